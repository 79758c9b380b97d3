def start():
    """Função para iniciar a CLI (mesmo papel do script coldstart-kode)"""
    from coldstart_kode.app.main import main  # ✅ Importação dentro da função evita configurar o logger cedo
    raise SystemExit(main())


if __name__ == "__main__":
    start()  # 🔹 Apenas inicia se executado diretamente

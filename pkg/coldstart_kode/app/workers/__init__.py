# coldstart_kode/app/workers/__init__.py
# Tarefas Celery em workers/tasks.py (células do sweep).

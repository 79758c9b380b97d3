# 🔹 Limiares de binarização por escala (valor = +1 sse raw > limiar)
DEFAULT_THRESHOLDS = {
    "stars": 3.0,    # escalas 1–5 (MovieLens, Flixter)
    "jester": 0.0,   # escala contínua −10..10
    "yahoo": 50.0,   # escala 0–100
}

# 🔹 Separadores aceitos na ingestão
SEPARATORS = {
    "tab": "\t",
    "comma": ",",
    "colons": "::",
}

# 🔹 Frações do protocolo de simulação
USER_FRACTIONS = (0.5, 0.25, 0.25)
ANSWER_FRACTION = 0.5
MIN_USERS_FOR_SPLIT = 4

# 🔹 Inicialização das matrizes latentes: Gaussiana(0, 0.01²)
INIT_STD = 0.01

# 🔹 Sementes padrão das 3 execuções do grid search
GRID_SEEDS = (1, 2, 3)

# 🔹 Grades padrão do grid search
DEFAULT_LATENT_DIMS = (10, 20, 50)
DEFAULT_LEARNING_RATES = (0.01, 0.05)
DEFAULT_LAMBDA1S = (1e-4, 1e-3)
DEFAULT_LAMBDA2_POINTS = 6
ITEMKNN_K_GRID = (10, 20, 50, 0)  # 0 = todos os vizinhos

# 🔹 Tamanhos de entrevista usados nas tabelas de cold-start
INTERVIEW_SIZES = (5, 10, 20)

# 🔹 Varredura CSW: fração do restante do Answer Set acrescentada após a entrevista
CSW_ADD_FRACTIONS = (0.0, 0.1, 0.25, 0.5)

# 🔹 PCA
PCA_TOLERANCE = 1e-10
PCA_MAX_ITER = 10_000
PCA_SEED = 0

# 🔹 Arquivo de modelo
MODEL_MAGIC = b"CSKODE\x00\x01"
MODEL_VERSION = 1

# 🔹 Códigos de saída da CLI
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_VERSION = 4
EXIT_FORMAT = 5
EXIT_DATA = 6
EXIT_TRAINING = 7
EXIT_CAPABILITY = 8
EXIT_LEAKAGE = 9

# 🔹 Auditoria do treino IAM: máximo de passos de clipping registrados
AUDIT_TRACE_CAPACITY = 100_000

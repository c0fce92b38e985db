# Collage INR: coordinate networks with masked Fourier bases
from config.settings import Settings

# Cap BLAS/OpenMP kernel parallelism before numpy loads; one thread keeps
# reductions in a fixed order.
try:
    Settings.load().apply_threads()
except ValueError:
    # Invalid settings are reported by the CLI when it loads them
    pass

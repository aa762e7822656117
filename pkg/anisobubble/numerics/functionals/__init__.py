from anisobubble.numerics.functionals.deficit import (
    DeficitReport,
    deficit,
    energy_count,
    kappa0,
    kappa0_diagnostics,
    normalize_kappa0,
)
from anisobubble.numerics.functionals.energy import energy_J
from anisobubble.numerics.functionals.kappa import (
    KappaFunction,
    anisotropic_laplacian,
    infer_kappa,
    kappa_precision_mask,
)

from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.bubbles.energies import gradient_energy, lebesgue_energy
from anisobubble.numerics.quadrature.fields import as_field


def energy_J(u, p, norm, rule=None):
    """
    J(u) = int H^p(grad u) / p - |u|^{p*} / p* dx. On a bubble J = S_p^n / n.
    """
    field = as_field(u, rule, order=1)
    p_star = critical_exponent(norm.n, p)
    grad_energy, _ = gradient_energy(field, p, norm)
    mass, _ = lebesgue_energy(field, p_star)
    return grad_energy / p - mass / p_star

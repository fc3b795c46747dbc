from hypothesis import strategies as st

from cheegerlab import chains


@st.composite
def kernels(draw, n_min=2, n_max=6, reversible=None):
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**31 - 1))
    density = draw(st.sampled_from([0.2, 0.5, 1.0]))
    rev = draw(st.booleans()) if reversible is None else reversible
    if rev:
        return chains.random_reversible(n, seed, density)
    return chains.random_general(n, seed, density)

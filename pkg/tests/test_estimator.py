import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ququart_mub import MuLikeTomography
from ququart_mub.error_analysis import random_state
from ququart_mub.tomography import TomographyError


def states(n, count=4):
    return np.array([random_state("mixed", 4 ** n, 0, i) for i in range(count)])


def test_params_and_clone():
    est = MuLikeTomography(n_ququarts=2, method="monomial")
    assert est.get_params() == {"n_ququarts": 2, "method": "monomial", "normalized": True}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est
    est.set_params(method="projector")
    assert est.method == "projector"


@pytest.mark.parametrize("method", ["projector", "monomial"])
@pytest.mark.parametrize("n", [1, 2])
def test_round_trip(n, method):
    rhos = states(n)
    est = MuLikeTomography(n, method).fit()
    tables = est.inverse_transform(rhos)
    assert tables.shape == (4, est.n_setups_, est.dim_)
    assert np.allclose(est.transform(tables), rhos, atol=1e-12)
    assert est.score(tables, rhos) > -1e-20
    assert est.transform(tables[0]).shape == (1, est.dim_, est.dim_)


def test_not_fitted_and_bad_params():
    with pytest.raises(NotFittedError):
        MuLikeTomography().transform(np.zeros((6, 4)))
    with pytest.raises(ValueError):
        MuLikeTomography(n_ququarts=4).fit()
    with pytest.raises(ValueError):
        MuLikeTomography(method="mle").fit()


def test_table_validation():
    est = MuLikeTomography().fit()
    with pytest.raises(TomographyError):
        est.transform(np.zeros((1, 6, 4)))
    with pytest.raises(ValueError):
        est.transform(np.zeros(4))
    loose = MuLikeTomography(normalized=False).fit()
    assert loose.transform(np.zeros((6, 4))).shape == (1, 4, 4)

"""Lazily built chain of objects for one cominuscule flag manifold."""
from functools import cached_property

from .braiding import commutor
from .cartan import RootSystem, parabolic_data, parse_type
from .clifford import SpinorSpace
from .exterior import AntisymmetricTensors, GradedPairing
from .quadratic import exterior_algebra, quadratic_dual, symmetric_algebra
from .repn import build_u_minus, build_u_plus, highest_weight_module
from .uqg import quantum_root_vectors, schubert_scaling


class ConfigError(ValueError):
    pass


class Flag:
    def __init__(self, typ, node):
        if isinstance(typ, str):
            typ, rank = parse_type(typ)
        else:
            typ, rank = typ
        self.rs = RootSystem(typ, rank)
        if not 1 <= node <= rank:
            raise ConfigError(f"node {node} out of range for {self.rs.name}")
        if not self.rs.is_cominuscule(node):
            raise ConfigError(f"node {node} of {self.rs.name} is not cominuscule")
        self.t = node

    @cached_property
    def pd(self):
        return parabolic_data(self.rs, self.t)

    @property
    def name(self):
        return self.pd.name

    @cached_property
    def u_plus(self):
        return build_u_plus(self.pd)

    @cached_property
    def u_minus(self):
        return build_u_minus(self.pd, self.u_plus)

    @cached_property
    def commutor_plus(self):
        return commutor(self.u_plus)

    @cached_property
    def commutor_minus(self):
        return commutor(self.u_minus)

    @cached_property
    def S(self):
        return symmetric_algebra(self.u_plus, self.commutor_plus)

    @cached_property
    def Lambda_minus(self):
        return quadratic_dual(self.S)

    @cached_property
    def Lambda_plus(self):
        return exterior_algebra(self.u_plus, self.commutor_plus)

    @cached_property
    def tensors_plus(self):
        return AntisymmetricTensors(self.u_plus, self.commutor_plus.sigma, self.Lambda_plus)

    @cached_property
    def tensors_minus(self):
        return AntisymmetricTensors(self.u_minus, self.commutor_minus.sigma, self.Lambda_minus)

    @cached_property
    def pairing(self):
        return GradedPairing(self.tensors_minus, self.tensors_plus)

    @cached_property
    def spinors(self):
        return SpinorSpace(self.u_plus, self.Lambda_plus, self.Lambda_minus,
                           self.tensors_plus, self.tensors_minus, self.pairing)

    @cached_property
    def schubert(self):
        return quantum_root_vectors(self.pd)

    @cached_property
    def scaling(self):
        return schubert_scaling(self.schubert, self.u_plus)

    def module(self, spec):
        """'trivial', 'omega1', 'omega2', ... or a comma separated weight '1,0,0'."""
        rs = self.rs
        spec = spec.strip()
        if spec == "trivial":
            lam = rs.zero()
        elif spec.startswith("omega"):
            i = int(spec[5:])
            if not 1 <= i <= rs.rank:
                raise ConfigError(f"no fundamental weight {spec}")
            lam = tuple(1 if k == i - 1 else 0 for k in range(rs.rank))
        else:
            try:
                lam = tuple(int(x) for x in spec.split(","))
            except ValueError:
                raise ConfigError(f"bad module spec {spec!r}")
            if len(lam) != rs.rank or min(lam) < 0:
                raise ConfigError(f"bad highest weight {spec!r}")
        return highest_weight_module(rs, lam, name=f"V({spec})")

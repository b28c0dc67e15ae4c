"""q-difference realization of U_q(sl(M|N)) on flag coordinates.

Generators act on supercommutative polynomials through atoms: a diagonal
q-power, optional diagonal q-bracket factors, lowerings, and a left
multiplier, in that order (right to left as the displays are written).  The
diagonal pieces are always evaluated at the exponents of the incoming
monomial, before any lowering or multiplication changes them.

Relation checking applies both sides of each identity to every monomial of
bounded degree and compares coefficients exactly, with q and all weights
lambda_i formal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .grassmann import FlagSpace, SuperPoly, basis_upto
from .report import RelationResult, numeric_check
from .ring import LinForm, RingElem, finite_symbols
from .structure import build_root_data

_NO_SHIFT = LinForm(0)

SABOTAGE_IDS = ("e_ii", "e_iip", "f1", "f2", "f3", "h", "f2-theta")


@dataclass(frozen=True)
class Atom:
    """One operator summand; fields are applied right to left."""

    shift: LinForm = _NO_SHIFT
    brackets: tuple = ()
    lowers: tuple = ()
    mult: tuple = ()
    coeff: int = 1

    def parity(self, space: FlagSpace) -> int:
        p = 0
        for v in self.mult:
            p ^= space.parity[space.index[v]]
        for v in self.lowers:
            p ^= space.parity[space.index[v]]
        return p

    def apply(self, space: FlagSpace, p: SuperPoly) -> SuperPoly:
        out = p
        if self.shift.const or self.shift.coeffs or self.shift.thetas:
            out = out.qshift(self.shift)
        for b in self.brackets:
            out = out.qbracket_diag(b)
        for v in reversed(self.lowers):
            out = out.lower(*v)
        for v in reversed(self.mult):
            out = SuperPoly.variable(space, *v) * out
        if self.coeff != 1:
            out = out.scale(self.coeff)
        return out


class QDiffOp:
    """Finite atom sum with a definite parity."""

    __slots__ = ("space", "atoms", "parity")

    def __init__(self, space: FlagSpace, atoms, parity: int):
        self.space = space
        self.atoms = tuple(atoms)
        self.parity = parity
        for a in self.atoms:
            if a.parity(space) != parity:
                raise ValueError(f"atom parity mismatch in {a}")

    def apply(self, p: SuperPoly) -> SuperPoly:
        out = SuperPoly(self.space, {})
        for a in self.atoms:
            out = out + a.apply(self.space, p)
        return out

    def __add__(self, other: "QDiffOp") -> "QDiffOp":
        if other.parity != self.parity:
            raise ValueError("parity mismatch in operator sum")
        return QDiffOp(self.space, self.atoms + other.atoms, self.parity)

    def scale(self, c: int) -> "QDiffOp":
        atoms = tuple(
            Atom(a.shift, a.brackets, a.lowers, a.mult, a.coeff * c)
            for a in self.atoms
        )
        return QDiffOp(self.space, atoms, self.parity)


class LinMap:
    """Linear map assembled from operators; only apply and parity remain."""

    __slots__ = ("fn", "parity")

    def __init__(self, fn, parity: int):
        self.fn = fn
        self.parity = parity

    def apply(self, p: SuperPoly) -> SuperPoly:
        return self.fn(p)


def compose(A, B) -> LinMap:
    """The map p -> A(B(p))."""
    return LinMap(lambda p: A.apply(B.apply(p)), (A.parity + B.parity) % 2)


def add_maps(A, B) -> LinMap:
    if A.parity != B.parity:
        raise ValueError("parity mismatch in map sum")
    return LinMap(lambda p: A.apply(p) + B.apply(p), A.parity)


def scale_map(A, c) -> LinMap:
    return LinMap(lambda p: A.apply(p).scale(c), A.parity)


def zero_map(space: FlagSpace, parity: int = 0) -> LinMap:
    return LinMap(lambda p: SuperPoly(space, {}), parity)


def graded_commutator(A, B, xi=None) -> LinMap:
    """[A, B]_xi = AB - (-1)^(|A||B|) xi BA as a linear map."""
    sign = -1 if (A.parity and B.parity) else 1

    def bracket(p):
        out = A.apply(B.apply(p))
        back = B.apply(A.apply(p))
        if xi is not None:
            back = back.scale(xi)
        return out - back.scale(sign)

    return LinMap(bracket, (A.parity + B.parity) % 2)


class FiniteRealization:
    """All operator builders for one (M|N) shape.

    sabotage deliberately corrupts one named atom family; every such
    corruption must surface as a relation failure (negative controls).
    """

    def __init__(self, M: int, N: int, sabotage: str | None = None):
        self.root = build_root_data(M, N)
        self.table = finite_symbols(self.root.rank)
        self.space = FlagSpace(self.root, self.table)
        if sabotage is not None and sabotage not in SABOTAGE_IDS:
            raise ValueError(f"unknown sabotage id {sabotage!r}")
        self.sabotage = sabotage

    # -- linear forms -----------------------------------------------------

    def _nu(self, i: int) -> int:
        return self.root.nu(i)

    def _theta_sum(self, lo: int, hi: int, pair_of) -> LinForm:
        """Sum over ell in [lo, hi] of c1*theta(p1) + c2*theta(p2)."""
        total = LinForm(0)
        for ell in range(lo, hi + 1):
            for coeff, pair in pair_of(ell):
                total = total + LinForm.theta(pair, coeff)
        return total

    def _head_sum(self, i: int, upto: int) -> LinForm:
        """Sum_{ell=1}^{upto} (nu_{i+1} theta_{ell,i+1} - nu_i theta_{ell,i})."""
        return self._theta_sum(
            1, upto,
            lambda ell: ((self._nu(i + 1), (ell, i + 1)), (-self._nu(i), (ell, i))),
        )

    def _tail_sum(self, j: int, start: int) -> LinForm:
        """Sum_{m=start}^{M+N} (nu_j theta_{j,m} - nu_{j+1} theta_{j+1,m})."""
        return self._theta_sum(
            start, self.root.total,
            lambda m: ((self._nu(j), (j, m)), (-self._nu(j + 1), (j + 1, m))),
        )

    def h_form(self, i: int) -> LinForm:
        nu = self._nu
        form = (
            -self._head_sum(i, i - 1)
            + LinForm.sym(f"l{i}")
            - LinForm.theta((i, i + 1), nu(i) + nu(i + 1))
            - self._tail_sum(i, i + 2)
        )
        if self.sabotage == "h":
            form = form + 1
        return form

    # -- atoms from the display equations -----------------------------------

    def _sab(self, atom: Atom, kind: str) -> Atom:
        if self.sabotage == kind:
            return Atom(atom.shift + 1, atom.brackets, atom.lowers, atom.mult, atom.coeff)
        return atom

    def atom_e_ii(self, i: int) -> Atom:
        return self._sab(
            Atom(shift=-self._head_sum(i, i - 1), lowers=((i, i + 1),)), "e_ii"
        )

    def atom_e_iip(self, i: int, ip: int) -> Atom:
        if not 1 <= ip <= i - 1:
            raise ValueError(f"need 1 <= i' <= i-1, got i'={ip}, i={i}")
        return self._sab(
            Atom(
                shift=-self._head_sum(i, ip - 1),
                lowers=((ip, i + 1),),
                mult=((ip, i),),
            ),
            "e_iip",
        )

    def atom_f1(self, j: int, jp: int) -> Atom:
        if not 1 <= jp <= j - 1:
            raise ValueError(f"need 1 <= j' <= j-1, got j'={jp}, j={j}")
        nu = self._nu
        shift = (
            self._theta_sum(
                jp + 1, j - 1,
                lambda m: ((nu(j + 1), (m, j + 1)), (-nu(j), (m, j))),
            )
            - LinForm.sym(f"l{j}")
            + LinForm.theta((j, j + 1), nu(j) + nu(j + 1))
            + self._tail_sum(j, j + 2)
        )
        return self._sab(
            Atom(shift=shift, lowers=((jp, j),), mult=((jp, j + 1),)), "f1"
        )

    def atom_f2(self, j: int) -> Atom:
        nu = self._nu
        if self.sabotage == "f2-theta":
            bracket = LinForm.sym(f"l{j}")
        else:
            bracket = (
                LinForm.sym(f"l{j}")
                - LinForm.theta((j, j + 1), nu(j))
                - self._tail_sum(j, j + 2)
            )
        return self._sab(Atom(brackets=(bracket,), mult=((j, j + 1),)), "f2")

    def atom_f2_half(self, j: int) -> Atom:
        """The alternative diagonal-bracket form; provably equal to atom_f2."""
        nu = self._nu
        bracket = (
            LinForm.sym(f"l{j}")
            - LinForm.theta((j, j + 1), Fraction(nu(j) + nu(j + 1), 2))
            - self._tail_sum(j, j + 2)
        )
        return Atom(brackets=(bracket,), mult=((j, j + 1),))

    def atom_f3(self, j: int, jp: int) -> Atom:
        if not j + 2 <= jp <= self.root.total:
            raise ValueError(f"need j+2 <= j' <= M+N, got j'={jp}, j={j}")
        shift = LinForm.sym(f"l{j}") - self._tail_sum(j, jp)
        return self._sab(
            Atom(shift=shift, lowers=((j + 1, jp),), mult=((j, jp),)), "f3"
        )

    # -- assembled generators -----------------------------------------------

    def _op(self, atoms) -> QDiffOp:
        atoms = tuple(atoms)
        parity = atoms[0].parity(self.space) if atoms else 0
        return QDiffOp(self.space, atoms, parity)

    def build_h(self, i: int) -> LinForm:
        return self.h_form(i)

    def build_t(self, i: int, power: int = 1) -> QDiffOp:
        return self._op([Atom(shift=self.h_form(i) * power)])

    def build_h_bracket(self, i: int) -> QDiffOp:
        """The diagonal operator [h_i]."""
        return self._op([Atom(brackets=(self.h_form(i),))])

    def build_e(self, i: int, variant: str) -> QDiffOp:
        if variant not in ("i", "ii"):
            raise ValueError(f"variant must be 'i' or 'ii', got {variant!r}")
        atoms = [self.atom_e_ii(i)]
        scale = self._nu(i) if variant == "i" else 1
        for ip in range(1, i):
            a = self.atom_e_iip(i, ip)
            atoms.append(Atom(a.shift, a.brackets, a.lowers, a.mult, a.coeff * scale))
        return self._op(atoms)

    def build_f(self, j: int, variant: str) -> QDiffOp:
        if variant not in ("i", "ii"):
            raise ValueError(f"variant must be 'i' or 'ii', got {variant!r}")
        c1 = 1 if variant == "i" else self._nu(j)
        c3 = -1 if variant == "i" else -self._nu(j + 1)
        atoms = []
        for jp in range(1, j):
            a = self.atom_f1(j, jp)
            atoms.append(Atom(a.shift, a.brackets, a.lowers, a.mult, a.coeff * c1))
        atoms.append(self.atom_f2(j))
        for jp in range(j + 2, self.root.total + 1):
            a = self.atom_f3(j, jp)
            atoms.append(Atom(a.shift, a.brackets, a.lowers, a.mult, a.coeff * c3))
        return self._op(atoms)

    def parity_map(self) -> LinMap:
        """The involution x_ij -> nu_j x_ij as a diagonal map."""
        nus = tuple(self._nu(j) for _, j in self.space.vars)

        def sign(m):
            s = 1
            for pos, e in enumerate(m):
                if e & 1 and nus[pos] < 0:
                    s = -s
            return s

        return LinMap(lambda p: p.scale_diag(sign), 0)


# -- relation checking -------------------------------------------------------


def _compare_maps(rel_id, params, lhs, rhs, basis, space, seed) -> RelationResult:
    """Apply both maps to every basis monomial and compare exactly."""
    pairs = []
    witness = None
    for m in basis:
        inp = SuperPoly(space, {m: space.table.one()})
        left = lhs.apply(inp)
        right = rhs.apply(inp)
        outs = set(left.terms) | set(right.terms)
        for out in sorted(outs, reverse=True):
            zero = space.table.zero()
            lc = left.terms.get(out, zero)
            rc = right.terms.get(out, zero)
            if len(pairs) < 64:
                pairs.append((lc, rc))
            if witness is None and not (lc - rc).is_zero():
                witness = {
                    "element": space.format_monomial(m),
                    "at": space.format_monomial(out),
                    "lhs": str(lc),
                    "rhs": str(rc),
                }
    if witness is not None:
        return RelationResult(rel_id, "fail", len(basis), params, witness)
    numeric = numeric_check(seed, rel_id, pairs)
    status = "pass" if numeric["status"] == "pass" else "fail"
    return RelationResult(rel_id, status, len(basis), params, None, numeric)


def check_chevalley(M, N, variant, D, seed=0, sabotage=None) -> list:
    real = FiniteRealization(M, N, sabotage)
    root, space = real.root, real.space
    basis = basis_upto(space, D)
    rank = root.rank
    table = space.table
    out = []
    base = {"M": M, "N": N, "variant": variant, "D": D}

    t = {i: real.build_t(i) for i in range(1, rank + 1)}
    tinv = {i: real.build_t(i, -1) for i in range(1, rank + 1)}
    e = {i: real.build_e(i, variant) for i in range(1, rank + 1)}
    f = {i: real.build_f(i, variant) for i in range(1, rank + 1)}

    for i in range(1, rank + 1):
        for j in range(i, rank + 1):
            out.append(_compare_maps(
                f"chevalley.eq1.i={i}.j={j}.variant={variant}",
                dict(base, i=i, j=j),
                compose(t[i], t[j]), compose(t[j], t[i]), basis, space, seed,
            ))

    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            a = root.cartan(i, j)
            for sign, gen in (("plus", e[j]), ("minus", f[j])):
                xi = table.qpow(LinForm(a if sign == "plus" else -a))
                out.append(_compare_maps(
                    f"chevalley.eq2.i={i}.j={j}.sign={sign}.variant={variant}",
                    dict(base, i=i, j=j, sign=sign),
                    compose(t[i], compose(gen, tinv[i])),
                    scale_map(gen, xi), basis, space, seed,
                ))

    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            lhs = graded_commutator(e[i], f[j])
            rhs = real.build_h_bracket(i) if i == j else zero_map(space)
            out.append(_compare_maps(
                f"chevalley.eq3.i={i}.j={j}.variant={variant}",
                dict(base, i=i, j=j),
                lhs, rhs, basis, space, seed,
            ))

    qpos = table.qpow(LinForm(1))
    qneg = table.qpow(LinForm(-1))
    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            if i == j or abs(root.cartan(i, j)) != 1 or i == M:
                continue
            for sign, gen in (("plus", e), ("minus", f)):
                inner = graded_commutator(gen[i], gen[j], qneg)
                lhs = graded_commutator(gen[i], inner, qpos)
                out.append(_compare_maps(
                    f"chevalley.eq4.i={i}.j={j}.sign={sign}.variant={variant}",
                    dict(base, i=i, j=j, sign=sign),
                    lhs, zero_map(space, lhs.parity), basis, space, seed,
                ))

    for sign, gen in (("plus", e), ("minus", f)):
        rel_id = f"chevalley.eq5.sign={sign}.variant={variant}"
        if M - 1 >= 1 and M + 1 <= rank:
            inner = graded_commutator(gen[M], gen[M - 1], qneg)
            mid = graded_commutator(gen[M + 1], inner, qpos)
            lhs = graded_commutator(gen[M], mid)
            out.append(_compare_maps(
                rel_id, dict(base, sign=sign), lhs,
                zero_map(space, lhs.parity), basis, space, seed,
            ))
        else:
            out.append(RelationResult(
                rel_id, "not-applicable", 0, dict(base, sign=sign),
                {"reason": f"needs nodes {M-1} and {M+1} inside 1..{rank}"},
            ))
    return out


def _intermediate_rhs29(real: FiniteRealization, i: int, j: int):
    atoms = []
    if i == j:
        atoms.append(Atom(
            shift=-real._head_sum(i, i - 1),
            brackets=(
                LinForm.sym(f"l{i}")
                - LinForm.theta((i, i + 1), real._nu(i) + real._nu(i + 1))
                - real._tail_sum(i, i + 2),
            ),
        ))
    if i == j + 1:
        nu = real._nu
        shift = (
            -real._head_sum(i, i - 1)
            + LinForm.sym(f"l{i-1}")
            - LinForm.theta((i - 1, i), nu(i - 1))
            - real._theta_sum(
                i + 1, real.root.total,
                lambda m: ((nu(i - 1), (i - 1, m)), (-nu(i), (i, m))),
            )
        )
        atoms.append(Atom(
            shift=shift,
            lowers=((i, i + 1),),
            mult=((i - 1, i),),
            coeff=nu(i),
        ))
    return atoms


def _intermediate_rhs30(real: FiniteRealization, i, ip, j, jp):
    if i != j or ip != jp:
        return []
    nu = real._nu
    shift = (
        -real._head_sum(i, ip - 1)
        + real._theta_sum(
            ip + 1, i - 1,
            lambda ell: ((nu(i + 1), (ell, i + 1)), (-nu(i), (ell, i))),
        )
        - LinForm.sym(f"l{i}")
        + LinForm.theta((i, i + 1), nu(i) + nu(i + 1))
        + real._tail_sum(i, i + 2)
    )
    bracket = LinForm.theta((ip, i), nu(i)) - LinForm.theta((ip, i + 1), nu(i + 1))
    return [Atom(shift=shift, brackets=(bracket,), coeff=nu(i))]


def _intermediate_rhs31(real: FiniteRealization, i, ip, j, jp):
    atoms = []
    nu = real._nu
    base_shift = (
        -real._theta_sum(
            1, j - 1,
            lambda ell: ((nu(i + 1), (ell, i + 1)), (-nu(i), (ell, i))),
        )
        + LinForm.sym(f"l{j}")
        - LinForm.theta((j, i + 1), nu(i + 1))
        - real._theta_sum(
            i + 1, real.root.total,
            lambda m: ((nu(j), (j, m)), (-nu(j + 1), (j + 1, m))),
        )
    )
    if ip == j and jp == i + 1:
        atoms.append(Atom(
            shift=base_shift, lowers=((j + 1, i + 1),), mult=((j, i),),
        ))
    if ip == j + 1 and jp == i:
        extra = LinForm.theta((j, i), nu(i) - nu(j))
        atoms.append(Atom(
            shift=base_shift + extra, lowers=((j + 1, i + 1),), mult=((j, i),),
            coeff=-1,
        ))
    return atoms


def check_intermediate(M, N, D, seed=0, sabotage=None) -> list:
    real = FiniteRealization(M, N, sabotage)
    root, space = real.root, real.space
    basis = basis_upto(space, D)
    rank = root.rank
    total = root.total
    out = []
    base = {"M": M, "N": N, "D": D}

    def op(atoms):
        return real._op(atoms) if atoms else zero_map(space)

    def bracket_of(a_atom, f_atom):
        return graded_commutator(real._op([a_atom]), real._op([f_atom]))

    # vanishing cross terms
    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            for jp in range(1, j):
                lhs = bracket_of(real.atom_e_ii(i), real.atom_f1(j, jp))
                out.append(_compare_maps(
                    f"intermediate.eq28.kind=e_ii-f1.i={i}.j={j}.jp={jp}",
                    dict(base, i=i, j=j, jp=jp),
                    lhs, zero_map(space, lhs.parity), basis, space, seed,
                ))
            for jp in range(j + 2, total + 1):
                lhs = bracket_of(real.atom_e_ii(i), real.atom_f3(j, jp))
                out.append(_compare_maps(
                    f"intermediate.eq28.kind=e_ii-f3.i={i}.j={j}.jp={jp}",
                    dict(base, i=i, j=j, jp=jp),
                    lhs, zero_map(space, lhs.parity), basis, space, seed,
                ))
            for ip in range(1, i):
                lhs = bracket_of(real.atom_e_iip(i, ip), real.atom_f2(j))
                out.append(_compare_maps(
                    f"intermediate.eq28.kind=e_iip-f2.i={i}.ip={ip}.j={j}",
                    dict(base, i=i, ip=ip, j=j),
                    lhs, zero_map(space, lhs.parity), basis, space, seed,
                ))

    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            lhs = bracket_of(real.atom_e_ii(i), real.atom_f2(j))
            rhs = op(_intermediate_rhs29(real, i, j))
            out.append(_compare_maps(
                f"intermediate.eq29.i={i}.j={j}", dict(base, i=i, j=j),
                lhs, rhs, basis, space, seed,
            ))

    for i in range(1, rank + 1):
        for ip in range(1, i):
            for j in range(1, rank + 1):
                for jp in range(1, j):
                    lhs = bracket_of(real.atom_e_iip(i, ip), real.atom_f1(j, jp))
                    rhs = op(_intermediate_rhs30(real, i, ip, j, jp))
                    out.append(_compare_maps(
                        f"intermediate.eq30.i={i}.ip={ip}.j={j}.jp={jp}",
                        dict(base, i=i, ip=ip, j=j, jp=jp),
                        lhs, rhs, basis, space, seed,
                    ))
                for jp in range(j + 2, total + 1):
                    lhs = bracket_of(real.atom_e_iip(i, ip), real.atom_f3(j, jp))
                    rhs = op(_intermediate_rhs31(real, i, ip, j, jp))
                    out.append(_compare_maps(
                        f"intermediate.eq31.i={i}.ip={ip}.j={j}.jp={jp}",
                        dict(base, i=i, ip=ip, j=j, jp=jp),
                        lhs, rhs, basis, space, seed,
                    ))

    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            parity = (root.gen_parity(i) + root.gen_parity(j)) % 2
            pieces = []
            pieces.append(("f2", bracket_of(real.atom_e_ii(i), real.atom_f2(j))))
            for ip in range(1, i):
                for jp in range(1, j):
                    pieces.append(("f1", bracket_of(
                        real.atom_e_iip(i, ip), real.atom_f1(j, jp))))
                for jp in range(j + 2, total + 1):
                    pieces.append(("f3", bracket_of(
                        real.atom_e_iip(i, ip), real.atom_f3(j, jp))))
            rhs = real.build_h_bracket(i) if i == j else zero_map(space)
            for eps_name, eps in (("nu_i", real._nu(i)), ("nu_j", real._nu(j))):
                for epsp_name, epsp in (("nu_i", real._nu(i)), ("nu_j+1", real._nu(j + 1))):
                    def combined(p, pieces=pieces, eps=eps, epsp=epsp):
                        acc = SuperPoly(space, {})
                        for kind, piece in pieces:
                            part = piece.apply(p)
                            if kind == "f1":
                                part = part.scale(eps)
                            elif kind == "f3":
                                part = part.scale(-epsp)
                            acc = acc + part
                        return acc

                    lhs = LinMap(combined, parity)
                    out.append(_compare_maps(
                        f"intermediate.eq33.i={i}.j={j}.eps={eps_name}.epsp={epsp_name}",
                        dict(base, i=i, j=j, eps=eps_name, epsp=epsp_name),
                        lhs, rhs, basis, space, seed,
                    ))
    return out


def check_remarks(M, N, D, seed=0) -> list:
    real = FiniteRealization(M, N)
    root, space = real.root, real.space
    basis = basis_upto(space, D)
    out = []
    base = {"M": M, "N": N, "D": D}
    sigma = real.parity_map()

    for i in range(1, root.rank + 1):
        scale = real._nu(i + 1)
        for gen_name, build in (("e", real.build_e), ("f", real.build_f)):
            lhs = scale_map(compose(sigma, compose(build(i, "i"), sigma)), scale)
            rhs = build(i, "ii")
            out.append(_compare_maps(
                f"remark1.gen={gen_name}.i={i}", dict(base, gen=gen_name, i=i),
                lhs, rhs, basis, space, seed,
            ))

    for j in range(1, root.rank + 1):
        lhs = real._op([real.atom_f2_half(j)])
        rhs = real._op([real.atom_f2(j)])
        out.append(_compare_maps(
            f"remark2.j={j}", dict(base, j=j), lhs, rhs, basis, space, seed,
        ))
    return out

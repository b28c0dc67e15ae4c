"""Normal-ordered vertex operators and exact mode extraction.

Every current is a sum of terms const * z^p0 * :exp(sum of oscillator
fields):, and each term is kept in the canonical normal-ordered split

    (creation exp) (e^{eps Q} word) q^{sum sigma_d d_0} z^{sum tau_d d_0}
    (annihilation exp).

Products of terms are fused back into this shape: moving one term's
annihilation exponential past another's creation exponential produces the
central series exp(sum_n kappa_n x^n) in x = z_right/z_left, and moving
zero-mode letters produces q-power constants, z-power shifts and crossing
signs.  Mode operators X_n are then read off exactly: applied to a Fock
state, only finitely many creation multisets and series orders can reach the
required z-powers, so the sum below every extraction is finite.

Per-mode coefficients of the field exponentials (on normalized modes):

    kind    creation dhat_{-m}          annihilation             zero modes
    full    +eta q^{sm}                 -eta q^{-sn} fhat_n      eps += eta,
                                                                 sigma += eta s,
                                                                 tau += eta
    plus    (none)                      +eta (q-q^-1)[n] q^{-sn} fhat_n
                                        (a-family: raw, no [n])  sigma += eta
    minus   -eta (q-q^-1)[m] q^{sm}     (none)                   sigma -= eta

Cartan-family full fields never occur (no e^{Q_a} in any current), which is
what keeps the a-family annihilators raw and every coefficient in the ring.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial
from typing import NamedTuple

from .oscillators import (
    C0,
    FAMILIES,
    ODD_SLOT,
    Q_SLOTS,
    FockState,
    OscillatorAlgebra,
    add_term,
    cocycle_sign,
    momentum_eigen,
)
from .ring import LinForm, RingElem, SymbolTable

A_FAMS = ("a1", "a2")
_NQ = len(Q_SLOTS)
_Q_INDEX = {s: i for i, s in enumerate(Q_SLOTS)}
_ZERO_FORM = LinForm(0)


class FieldOcc(NamedTuple):
    fam: str
    kind: str  # full | plus | minus
    shift: LinForm  # s in d(q^s z), linear in the level
    eta: int


class VTerm:
    """One normal-ordered exponential term with its own z variable."""

    def __init__(self, alg: OscillatorAlgebra, const: RingElem, p0: int, occs, uid: int):
        self.alg = alg
        self.table = alg.table
        self.const = const
        self.p0 = p0
        self.occs = tuple(FieldOcc(*o) for o in occs)
        self.uid = uid

        eps = [0] * _NQ
        sigma = [_ZERO_FORM] * _NQ
        tau = [0] * _NQ
        sigma_a = [0, 0]
        for fam, kind, shift, eta in self.occs:
            if kind not in ("full", "plus", "minus"):
                raise ValueError(f"unknown field kind {kind!r}")
            if fam in A_FAMS:
                if kind == "full":
                    raise ValueError("full Cartan fields are not supported")
                sigma_a[A_FAMS.index(fam)] += eta if kind == "plus" else -eta
            else:
                t = _Q_INDEX[fam]
                if kind == "full":
                    eps[t] += eta
                    sigma[t] = sigma[t] + shift * eta
                    tau[t] += eta
                elif kind == "plus":
                    sigma[t] = sigma[t] + LinForm(eta)
                else:
                    sigma[t] = sigma[t] - LinForm(eta)
        self.eps = tuple(eps)
        self.sigma = tuple(sigma)
        self.tau = tuple(tau)
        self.sigma_a = tuple(sigma_a)

        cre, ann = [], []
        for fam in FAMILIES:
            kinds = [o.kind for o in self.occs if o.fam == fam]
            if "full" in kinds or "minus" in kinds:
                cre.append(fam)
            if "full" in kinds or "plus" in kinds:
                ann.append(fam)
        self.cre_fams = tuple(cre)
        self.ann_fams = tuple(ann)
        self._cre_cache: dict = {}
        self._ann_cache: dict = {}

    def cre_coeff(self, fam: str, m: int) -> RingElem:
        key = (fam, m)
        out = self._cre_cache.get(key)
        if out is None:
            T = self.table
            out = T.zero()
            for occ in self.occs:
                if occ.fam != fam:
                    continue
                if occ.kind == "full":
                    out = out + T.qpow(occ.shift * m) * occ.eta
                elif occ.kind == "minus":
                    out = out - T.qdiff() * T.qint(m) * T.qpow(occ.shift * m) * occ.eta
            self._cre_cache[key] = out
        return out

    def ann_coeff(self, fam: str, n: int) -> RingElem:
        key = (fam, n)
        out = self._ann_cache.get(key)
        if out is None:
            T = self.table
            out = T.zero()
            for occ in self.occs:
                if occ.fam != fam:
                    continue
                if occ.kind == "full":
                    out = out - T.qpow(occ.shift * (-n)) * occ.eta
                elif occ.kind == "plus":
                    c = T.qdiff() * T.qpow(occ.shift * (-n)) * occ.eta
                    if fam not in A_FAMS:
                        c = c * T.qint(n)
                    out = out + c
            self._ann_cache[key] = out
        return out


class FusedTerm:
    """A normal-ordered product of VTerms, one z variable per factor."""

    __slots__ = ("alg", "const", "p0s", "eps", "sigma", "sigma_a", "taus", "vterms", "uid")

    def __init__(self, alg, const, p0s, eps, sigma, sigma_a, taus, vterms, uid):
        self.alg = alg
        self.const = const
        self.p0s = p0s
        self.eps = eps
        self.sigma = sigma
        self.sigma_a = sigma_a
        self.taus = taus
        self.vterms = vterms
        self.uid = uid


class VertexEngine:
    """Builds, fuses and extracts modes of vertex-operator terms.

    All caches are keyed by construction-order uids, so repeated runs over
    the same context produce identical results in identical order.
    """

    def __init__(self, alg: OscillatorAlgebra):
        self.alg = alg
        self.table = alg.table
        self._uids = itertools.count()
        self._singles: dict = {}
        self._kappa: dict = {}  # (uidA, uidB) -> list of kappa_n, n >= 1
        self._series: dict = {}  # (uidA, uidB) -> list of C_l, l >= 0
        self._buckets: dict = {}  # (vt.uid, degree) -> [(delta occ, scalar)]
        self._branches: dict = {}  # (fused.uid, state) -> branch data
        self._prodcache: dict = {}  # sorted ((vt.uid, degree), ...) -> merged buckets
        self._flowcache: dict = {}  # (fused.uid, res) -> ((dvec, scalar), ...)

    def make_vterm(self, const: RingElem, p0: int, occs) -> VTerm:
        return VTerm(self.alg, const, p0, occs, next(self._uids))

    def single(self, vt: VTerm) -> FusedTerm:
        f = self._singles.get(vt.uid)
        if f is None:
            f = FusedTerm(
                self.alg, vt.const, (vt.p0,), vt.eps, vt.sigma, vt.sigma_a,
                (vt.tau,), (vt,), next(self._uids),
            )
            self._singles[vt.uid] = f
        return f

    def fuse(self, fused: FusedTerm, vt: VTerm) -> FusedTerm:
        """Normal-order fused * vt, vt owning the new rightmost variable."""
        T = self.table
        corr = _ZERO_FORM
        for t in range(_NQ):
            if vt.eps[t]:
                corr = corr + fused.sigma[t] * (vt.eps[t] * C0[Q_SLOTS[t]])
        const = fused.const * vt.const
        if corr.const or corr.coeffs:
            const = const * T.qpow(corr)
        sign = 1
        for s in range(_NQ):
            if ODD_SLOT[s] and vt.eps[s]:
                crossings = sum(
                    abs(fused.eps[t]) for t in range(s + 1, _NQ) if ODD_SLOT[t]
                )
                if (abs(vt.eps[s]) * crossings) % 2:
                    sign = -sign
        if sign < 0:
            const = -const
        p0s = tuple(
            fused.p0s[v]
            + sum(fused.taus[v][t] * vt.eps[t] * C0[Q_SLOTS[t]] for t in range(_NQ))
            for v in range(len(fused.vterms))
        ) + (vt.p0,)
        eps = tuple(a + b for a, b in zip(fused.eps, vt.eps))
        sigma = tuple(a + b for a, b in zip(fused.sigma, vt.sigma))
        sigma_a = tuple(a + b for a, b in zip(fused.sigma_a, vt.sigma_a))
        return FusedTerm(
            self.alg, const, p0s, eps, sigma, sigma_a,
            fused.taus + (vt.tau,), fused.vterms + (vt,), next(self._uids),
        )

    def _series_coeff(self, vtA: VTerm, vtB: VTerm, l: int) -> RingElem:
        """C_l of exp(sum kappa_n x^n), contractions of A's annihilators
        against B's creators at each order n."""
        key = (vtA.uid, vtB.uid)
        lst = self._series.get(key)
        if lst is None:
            lst = [self.table.one()]
            self._series[key] = lst
            self._kappa[key] = []
        kappas = self._kappa[key]
        while len(lst) <= l:
            n = len(lst)
            while len(kappas) < n:
                j = len(kappas) + 1
                kap = self.table.zero()
                for af in vtA.ann_fams:
                    a = vtA.ann_coeff(af, j)
                    if a.is_zero():
                        continue
                    for cf in vtB.cre_fams:
                        con = self.alg.contract_hat(af, cf, j)
                        if con.is_zero():
                            continue
                        kap = kap + a * vtB.cre_coeff(cf, j) * con
                kappas.append(kap)
            tot = self.table.zero()
            for j in range(1, n + 1):
                if not kappas[j - 1].is_zero():
                    tot = tot + kappas[j - 1] * lst[n - j] * j
            lst.append(tot * Fraction(1, n))
        return lst[l]

    def buckets(self, vt: VTerm, degree: int):
        """Creation multisets of total energy `degree` with their scalars
        prod coeff^mult / mult!.  State independent."""
        key = (vt.uid, degree)
        out = self._buckets.get(key)
        if out is not None:
            return out
        out = []
        modes = [(fam, m) for fam in vt.cre_fams for m in range(1, degree + 1)]

        def rec(idx, remaining, delta, scalar):
            if remaining == 0:
                out.append((tuple(delta), scalar))
                return
            if idx == len(modes):
                return
            fam, m = modes[idx]
            rec(idx + 1, remaining, delta, scalar)
            coeff = vt.cre_coeff(fam, m)
            if not coeff.is_zero():
                power = scalar
                mult = 1
                while m * mult <= remaining:
                    power = power * coeff
                    rec(
                        idx + 1,
                        remaining - m * mult,
                        delta + [((fam, m), mult)],
                        power * Fraction(1, factorial(mult)),
                    )
                    mult += 1

        rec(0, degree, [], self.table.one())
        self._buckets[key] = out
        return out

    def bucket_product(self, vts, dvec):
        """Creation buckets of all variables merged into one list of
        (occupation delta, scalar).  The key ignores variable order, so
        permuted products of the same terms share one entry."""
        pairs = tuple(
            sorted(
                ((vt, d) for vt, d in zip(vts, dvec) if d),
                key=lambda p: (p[0].uid, p[1]),
            )
        )
        key = tuple((vt.uid, d) for vt, d in pairs)
        out = self._prodcache.get(key)
        if out is None:
            out = self._merge_buckets(pairs)
            self._prodcache[key] = out
        return out

    def _merge_buckets(self, pairs):
        acc = [({}, self.table.one())]
        for vt, d in pairs:
            part = self.buckets(vt, d)
            if not part:
                acc = []
                break
            nxt = []
            for occ_acc, s_acc in acc:
                for delta, bscal in part:
                    occ = dict(occ_acc)
                    for mode, mu in delta:
                        occ[mode] = occ.get(mode, 0) + mu
                    nxt.append((occ, s_acc * bscal))
            acc = nxt
        merged: dict = {}
        for occ, s in acc:
            k = tuple(sorted(occ.items()))
            prev = merged.get(k)
            merged[k] = s if prev is None else prev + s
        return [(k, s) for k, s in merged.items() if not s.is_zero()]

    def _state_branches(self, fused: FusedTerm, state: FockState):
        """Annihilation branches of `fused` on `state`, scalars carrying the
        state-level prefactor; target independent."""
        key = (fused.uid, state)
        cached = self._branches.get(key)
        if cached is not None:
            return cached
        T = self.table
        r = len(fused.vterms)
        common = fused.const * momentum_eigen(T, fused.sigma, fused.sigma_a, state)
        if cocycle_sign(fused.eps, state.momenta) < 0:
            common = -common
        taueig = tuple(
            sum(fused.taus[v][t] * C0[Q_SLOTS[t]] * state.momenta[t] for t in range(_NQ))
            for v in range(r)
        )
        momenta = tuple(m + e for m, e in zip(state.momenta, fused.eps))

        letter_opts = []
        for (fam, m), mult in state.occ:
            values = []
            for v in range(r):
                vt = fused.vterms[v]
                val = T.zero()
                for af in vt.ann_fams:
                    con = self.alg.contract_hat(af, fam, m)
                    if con.is_zero():
                        continue
                    a = vt.ann_coeff(af, m)
                    if not a.is_zero():
                        val = val + a * con
                values.append(val)
            live = [v for v in range(r) if not values[v].is_zero()]
            opts = []
            for js in itertools.product(*(range(mult + 1) if v in live else (0,) for v in range(r))):
                total = sum(js)
                if total > mult:
                    continue
                coeff = Fraction(factorial(mult), factorial(mult - total))
                scalar = T.rational(coeff / _prod_factorials(js))
                for v in range(r):
                    for _ in range(js[v]):
                        scalar = scalar * values[v]
                opts.append((scalar, tuple(m * j for j in js), mult - total))
            letter_opts.append(((fam, m), opts))

        branches = []
        for combo in itertools.product(*(opts for _, opts in letter_opts)):
            scalar = common
            annE = [0] * r
            occ = []
            for ((fam, m), _), (s, ann_v, rem) in zip(letter_opts, combo):
                scalar = scalar * s
                for v in range(r):
                    annE[v] += ann_v[v]
                if rem:
                    occ.append(((fam, m), rem))
            if not scalar.is_zero():
                branches.append((scalar, tuple(annE), tuple(occ)))

        data = (branches, taueig, momenta)
        self._branches[key] = data
        return data

    def flows_map(self, fused: FusedTerm, res):
        """Creation-degree vectors reachable from `res` with their summed
        series scalars, nonnegative degrees only."""
        key = (fused.uid, res)
        out = self._flowcache.get(key)
        if out is None:
            local: dict = {}
            for dvec, ss in self._flows(fused, res):
                if any(d < 0 for d in dvec):
                    continue
                prev = local.get(dvec)
                local[dvec] = ss if prev is None else prev + ss
            out = tuple((d, s) for d, s in local.items() if not s.is_zero())
            self._flowcache[key] = out
        return out

    def _flows(self, fused: FusedTerm, res):
        """Creation degrees per variable and the series scalar for every
        admissible distribution of contraction orders between variables."""
        r = len(res)
        vts = fused.vterms
        if r == 1:
            if res[0] >= 0:
                yield (res[0],), self.table.one()
            return
        if r == 2:
            for l in range(max(0, -res[0]), res[1] + 1):
                c = self._series_coeff(vts[0], vts[1], l)
                if not c.is_zero():
                    yield (res[0] + l, res[1] - l), c
            return
        if r == 3:
            for l12 in range(0, res[2] + 1):
                c12 = self._series_coeff(vts[1], vts[2], l12)
                if c12.is_zero():
                    continue
                for l02 in range(0, res[2] - l12 + 1):
                    c02 = self._series_coeff(vts[0], vts[2], l02)
                    if c02.is_zero():
                        continue
                    base = c12 * c02
                    for l01 in range(max(0, -res[0] - l02), res[1] + l12 + 1):
                        c01 = self._series_coeff(vts[0], vts[1], l01)
                        if c01.is_zero():
                            continue
                        yield (
                            res[0] + l01 + l02,
                            res[1] + l12 - l01,
                            res[2] - l02 - l12,
                        ), base * c01
            return
        raise ValueError(f"unsupported number of fused variables: {r}")

    def extract(self, fused: FusedTerm, targets, state: FockState) -> dict:
        """The (z_0^targets[0] ... ) coefficient of fused applied to state,
        as a dict FockState -> RingElem."""
        branches, taueig, momenta = self._state_branches(fused, state)
        r = len(fused.vterms)
        out: dict = {}
        for base, annE, occ_after in branches:
            res = tuple(
                targets[v] - fused.p0s[v] - taueig[v] + annE[v] for v in range(r)
            )
            if sum(res) < 0:
                continue
            for dvec, series_scalar in self.flows_map(fused, res):
                mid = base * series_scalar
                if mid.is_zero():
                    continue
                for delta, pscal in self.bucket_product(fused.vterms, dvec):
                    coeff = mid * pscal
                    if coeff.is_zero():
                        continue
                    occ = dict(occ_after)
                    for mode, mu in delta:
                        occ[mode] = occ.get(mode, 0) + mu
                    add_term(out, FockState(momenta, tuple(sorted(occ.items()))), coeff)
        return out

    def aggregate(self, jobs, state: FockState):
        """Scalar prefactors of weighted extractions, summed per
        (momenta, leftover occupation, creation-degree multiset).

        jobs: iterable of (fused, targets, weight or None).  Permuted
        factor orders land on the same key, so terms of a relation that
        cancel do so while still cheap, and a zero aggregate later skips
        its whole block of output states.  Returns (groups, dpairs_of)
        with groups a dict key -> scalar and dpairs_of resolving each
        degree multiset to its (vterm, degree) pairs."""
        acc: dict = {}
        pairs_of: dict = {}
        for fused, targets, weight in jobs:
            branches, taueig, momenta = self._state_branches(fused, state)
            if not branches:
                continue
            r = len(fused.vterms)
            for base, annE, occ_after in branches:
                res = tuple(
                    targets[v] - fused.p0s[v] - taueig[v] + annE[v] for v in range(r)
                )
                if sum(res) < 0:
                    continue
                flows = self.flows_map(fused, res)
                if not flows:
                    continue
                for dvec, ssum in flows:
                    dpairs = tuple(
                        sorted(
                            ((vt, d) for vt, d in zip(fused.vterms, dvec) if d),
                            key=lambda p: (p[0].uid, p[1]),
                        )
                    )
                    dkey = tuple((vt.uid, d) for vt, d in dpairs)
                    if dkey not in pairs_of:
                        pairs_of[dkey] = dpairs
                    key = (momenta, occ_after, dkey)
                    mid = base * ssum
                    if weight is not None:
                        mid = mid * weight
                    prev = acc.get(key)
                    acc[key] = mid if prev is None else prev + mid
        return acc, pairs_of

    def bucket_product_key(self, dkey, dpairs):
        part = self._prodcache.get(dkey)
        if part is None:
            part = self._merge_buckets(dpairs)
            self._prodcache[dkey] = part
        return part

    def extract_sum(self, jobs, state: FockState) -> dict:
        """Sum of weighted mode extractions applied to one state.

        jobs: iterable of (fused, targets, weight or None)."""
        acc, pairs_of = self.aggregate(jobs, state)
        out: dict = {}
        for (momenta, occ_after, dkey), mid in acc.items():
            if mid.is_zero():
                continue
            for delta, pscal in self.bucket_product_key(dkey, pairs_of[dkey]):
                coeff = mid * pscal
                if coeff.is_zero():
                    continue
                occ = dict(occ_after)
                for mode, mu in delta:
                    occ[mode] = occ.get(mode, 0) + mu
                add_term(out, FockState(momenta, tuple(sorted(occ.items()))), coeff)
        return out


def _prod_factorials(js) -> int:
    out = 1
    for j in js:
        out *= factorial(j)
    return out


def _lf(c=0, k=0) -> LinForm:
    c = Fraction(c)
    k = Fraction(k)
    return LinForm(c, {"k": k} if k else None)


CURRENT_PARITY = {"E1": 0, "E2": 1, "F1": 0, "F2": 1,
                  "psi1+": 0, "psi1-": 0, "psi2+": 0, "psi2-": 0}


def default_e_values(table: SymbolTable) -> dict:
    return {name: table.monomial({name: 1}) for name in ("e11", "e12", "e21", "e22")}


def f_constants(table: SymbolTable, e_values: dict, overrides=None) -> dict:
    """The seven F-current constants forced by the E-current ones."""
    e11, e12 = e_values["e11"], e_values["e12"]
    e21, e22 = e_values["e21"], e_values["e22"]
    q = table.qpow(LinForm(1))
    out = {
        "f11": e11.inverse(),
        "f12": e12.inverse(),
        "f13": table.qpow(_lf(1, 1)) * e21 * (e11 * e22).inverse(),
        "f21": q * e21.inverse(),
        "f22": q * e12 * (e11 * e21).inverse(),
        "f23": e22.inverse(),
        "f24": e12 * (e11 * e22).inverse(),
    }
    if overrides:
        for name, value in overrides.items():
            if name not in out:
                raise ValueError(f"unknown F-constant {name!r}")
            out[name] = value
    return out


def make_currents(engine: VertexEngine, values: dict) -> dict:
    """All current terms, keyed by current name.

    `values` must hold ring elements for e11..e22 and f11..f24."""
    inv = engine.table.qdiff_inv()
    v = values
    mk = engine.make_vterm
    half = Fraction(1, 2)

    currents = {
        "E1": [
            mk(-v["e11"] * inv, -1, [
                ("b12", "plus", _lf(), 1),
                ("b12", "full", _lf(1), -1),
                ("c12", "full", _lf(1), -1),
            ]),
            mk(v["e12"] * inv, -1, [
                ("b12", "minus", _lf(), 1),
                ("b12", "full", _lf(-1), -1),
                ("c12", "full", _lf(-1), -1),
            ]),
        ],
        "E2": [
            mk(v["e21"], 0, [
                ("b12", "plus", _lf(1), -1),
                ("b13", "plus", _lf(1), -1),
                ("b23", "full", _lf(1), 1),
            ]),
            mk(v["e22"], 0, [
                ("b12", "full", _lf(), 1),
                ("c12", "full", _lf(), 1),
                ("b13", "full", _lf(), 1),
            ]),
        ],
        "F1": [
            mk(v["f11"] * inv, -1, [
                ("a1", "plus", _lf(half, half), 1),
                ("b12", "plus", _lf(2, 1), 1),
                ("b13", "plus", _lf(2, 1), 1),
                ("b23", "plus", _lf(1, 1), -1),
                ("b12", "full", _lf(1, 1), 1),
                ("c12", "full", _lf(1, 1), 1),
            ]),
            mk(-v["f12"] * inv, -1, [
                ("a1", "minus", _lf(-half, -half), 1),
                ("b12", "minus", _lf(-2, -1), 1),
                ("b13", "minus", _lf(-2, -1), 1),
                ("b23", "minus", _lf(-1, -1), -1),
                ("b12", "full", _lf(-1, -1), 1),
                ("c12", "full", _lf(-1, -1), 1),
            ]),
            # This term is defined with its two odd zero modes ordered
            # e^{Q_b23} e^{-Q_b13}; the Fock basis stores slots ascending,
            # and the two exponentials anticommute, hence the minus sign.
            mk(-v["f13"], 0, [
                ("a1", "plus", _lf(half, half), 1),
                ("b23", "plus", _lf(1, 1), -1),
                ("b13", "full", _lf(1, 1), -1),
                ("b23", "full", _lf(2, 1), 1),
            ]),
        ],
        "F2": [
            mk(v["f21"] * inv, -1, [
                ("a2", "plus", _lf(half, half), 1),
                ("b23", "full", _lf(1, 1), -1),
            ]),
            mk(-v["f22"] * inv, -1, [
                ("a2", "minus", _lf(-half, -half), 1),
                ("b23", "full", _lf(-1, -1), -1),
            ]),
            mk(-v["f23"] * inv, -1, [
                ("a2", "minus", _lf(-half, -half), 1),
                ("b12", "minus", _lf(-1, -1), -1),
                ("b13", "minus", _lf(-1, -1), -1),
                ("b12", "full", _lf(0, -1), -1),
                ("c12", "full", _lf(0, -1), -1),
                ("b13", "full", _lf(0, -1), -1),
            ]),
            mk(v["f24"] * inv, -1, [
                ("a2", "minus", _lf(-half, -half), 1),
                ("b12", "plus", _lf(-1, -1), -1),
                ("b13", "minus", _lf(-1, -1), -1),
                ("b12", "full", _lf(-2, -1), -1),
                ("c12", "full", _lf(-2, -1), -1),
                ("b13", "full", _lf(0, -1), -1),
            ]),
        ],
        "psi1+": [
            mk(engine.table.one(), 0, [
                ("a1", "plus", _lf(half, half), 1),
                ("b12", "plus", _lf(0, 1), 1),
                ("b12", "plus", _lf(2, 1), 1),
                ("b13", "plus", _lf(2, 1), 1),
                ("b23", "plus", _lf(1, 1), -1),
            ]),
        ],
        "psi1-": [
            mk(engine.table.one(), 0, [
                ("a1", "minus", _lf(-half, -half), 1),
                ("b12", "minus", _lf(0, -1), 1),
                ("b12", "minus", _lf(-2, -1), 1),
                ("b13", "minus", _lf(-2, -1), 1),
                ("b23", "minus", _lf(-1, -1), -1),
            ]),
        ],
        "psi2+": [
            mk(engine.table.one(), 0, [
                ("a2", "plus", _lf(half, half), 1),
                ("b12", "plus", _lf(1, 1), -1),
                ("b13", "plus", _lf(1, 1), -1),
            ]),
        ],
        "psi2-": [
            mk(engine.table.one(), 0, [
                ("a2", "minus", _lf(-half, -half), 1),
                ("b12", "minus", _lf(-1, -1), -1),
                ("b13", "minus", _lf(-1, -1), -1),
            ]),
        ],
    }
    return currents


def h_coeffs(table: SymbolTable, i: int, n: int) -> dict:
    """Coefficients of the raw oscillators inside the Cartan mode H^i_n."""
    if n == 0:
        raise ValueError("H zero modes are diagonal and handled via K")
    an = abs(n)
    half = table.qpow(LinForm(Fraction(-an, 2)))
    inner = table.qpow(LinForm(-an, {"k": Fraction(-an, 2)}))
    if i == 1:
        outer = table.qpow(LinForm(-2 * an, {"k": Fraction(-an, 2)}))
        osc = table.qpow(LinForm(an)) + table.qpow(LinForm(-an))
        return {"a1": half, "b12": inner * osc, "b13": outer, "b23": -inner}
    if i == 2:
        return {"a2": half, "b12": -inner, "b13": -inner}
    raise ValueError(f"no Cartan current with index {i}")

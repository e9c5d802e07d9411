"""
Linear-transformation rewrite rules on MB integrals.

Single-variable forms a-e are the five MB representations of the Gauss
function, 2F1(A,B;C;u) = P_X * J_X(A,B,C;u), with

    a: Γ(C)/(Γ(A)Γ(B))                          Γ(A+s)Γ(B+s)/Γ(C+s)      kernel -u
    b: (1-u)^(C-A-B) Γ(C)/(Γ(C-A)Γ(C-B))        Γ(C-A+s)Γ(C-B+s)/Γ(C+s)  kernel -u
    c: Γ(C)/(Γ(A)Γ(B)Γ(C-A)Γ(C-B))              Γ(C-A-B-s)Γ(A+s)Γ(B+s)   kernel 1-u
    d: (1-u)^(-A) Γ(C)/(Γ(A)Γ(C-B))             Γ(A+s)Γ(C-B+s)/Γ(C+s)    kernel -u/(u-1)
    e: (1-u)^(-B) Γ(C)/(Γ(B)Γ(C-A))             Γ(B+s)Γ(C-A+s)/Γ(C+s)    kernel -u/(u-1)

each times Γ(-s). Pair forms k, l, m are the F1-type, KdF-type and F2-type
integrals on (z_i, z_j) = (s, t) with joint numerators a_k, joint
denominators c_k and kernels (K_i, K_j) of the F1-type reading:

    k: 1          ΠΓ(a+s+t)/ΠΓ(c+s+t) Γ(b+s)Γ(b'+t)                        (K_i, K_j)
    l: Γ(b')      ΠΓ(a+s+t)/ΠΓ(c+s+t) Γ(b+b'+s+t)Γ(b+s)/Γ(b+b'+s)          (K_i-K_j, K_j)
    m: Γ(b)(K_i/K_j)^b'  ΠΓ(a+t)/ΠΓ(c+t) Γ(b+b'+s+t)Γ(b'+s)/Γ(b+b'+s)     ((K_i-K_j)/K_j, K_i)

each times Γ(-s)Γ(-t). A step from source X to target Y replaces J_X by
(P_Y/P_X) J_Y.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .config.constants import (
    Side, SINGLE_LETTERS, PAIR_LETTERS, ENUMERATED_SINGLE_SOURCES, ENUMERATED_PAIR_SOURCES,
)
from .errors import NoMatch, AmbiguousMatch
from .expr import Expr, Add, Sub, Div, Neg, ONE, expr_equal, simplify_basic, to_text
from .mb_model import canonicalize, cancel_pairs, fold_exponents, route_gammas, RawPower
from .models import Extraction, GammaArg, GammaFactor, MBIntegral, TransformStep

logger = logging.getLogger(__name__)

SideArg = Tuple[GammaArg, Side]

NUM, DEN = Side.NUM, Side.DEN


@dataclass(frozen=True)
class FormInstance:
    """A form's integrand factors, kernels and standalone prefactor for given parameters."""
    gammas: Tuple[SideArg, ...]
    kernels: Tuple[Expr, ...]
    constants: Tuple[SideArg, ...]
    powers: Tuple[RawPower, ...]


# ---------------------------------------------------------------------------
# Single-variable forms
# ---------------------------------------------------------------------------

def _single_form(letter: str, i: int, A: GammaArg, B: GammaArg, C: GammaArg, u: Expr) -> FormInstance:
    s = GammaArg.var(i)
    base = simplify_basic(Sub(ONE, u))
    if letter == 'a':
        gammas = ((A + s, NUM), (B + s, NUM), (C + s, DEN))
        kernel, constants, exponent = Neg(u), ((C, NUM), (A, DEN), (B, DEN)), None
    elif letter == 'b':
        gammas = ((C - A + s, NUM), (C - B + s, NUM), (C + s, DEN))
        kernel, constants, exponent = Neg(u), ((C, NUM), (C - A, DEN), (C - B, DEN)), C - A - B
    elif letter == 'c':
        gammas = ((C - A - B - s, NUM), (A + s, NUM), (B + s, NUM))
        kernel, constants, exponent = base, ((C, NUM), (A, DEN), (B, DEN), (C - A, DEN), (C - B, DEN)), None
    elif letter == 'd':
        gammas = ((A + s, NUM), (C - B + s, NUM), (C + s, DEN))
        kernel, constants, exponent = Neg(Div(u, Sub(u, ONE))), ((C, NUM), (A, DEN), (C - B, DEN)), -A
    elif letter == 'e':
        gammas = ((B + s, NUM), (C - A + s, NUM), (C + s, DEN))
        kernel, constants, exponent = Neg(Div(u, Sub(u, ONE))), ((C, NUM), (B, DEN), (C - A, DEN)), -B
    else:
        raise NoMatch(f"'{letter}' is not a single-variable form")
    powers = ((base, exponent),) if exponent is not None else ()
    return FormInstance(gammas, (simplify_basic(kernel),), constants, powers)


def _split_by_coefficient(m: MBIntegral, indices: Sequence[int]):
    """Positions of the bare Γ(-z_i) factors and the remaining factors touching ``indices``."""
    bare: Dict[int, int] = {}
    rest: List[Tuple[int, GammaFactor]] = []
    for pos, g in enumerate(m.gammas):
        if not any(g.arg.depends_on(i) for i in indices):
            continue
        index = g.arg.variables[0] if g.arg.is_pure else None
        if g.side is NUM and index in indices and index not in bare:
            bare[index] = pos
        else:
            rest.append((pos, g))
    for i in indices:
        if i not in bare:
            raise NoMatch(f"no Γ(-z{i}) factor")
    return bare, rest


def _match_single(m: MBIntegral, i: int, letter: str) -> Extraction:
    bare, rest = _split_by_coefficient(m, (i,))
    groups: Dict[Tuple[Side, int], List[Tuple[int, GammaArg]]] = {}
    for pos, g in rest:
        coeff = g.arg.coeff(i)
        if abs(coeff) != 1:
            raise NoMatch(f"z{i} enters {g.to_text()} with coefficient {coeff}")
        groups.setdefault((g.side, coeff), []).append((pos, g.arg.without(i)))
    plus_num = groups.get((NUM, 1), [])
    minus_num = groups.get((NUM, -1), [])
    plus_den = groups.get((DEN, 1), [])
    minus_den = groups.get((DEN, -1), [])
    kernel = m.kernels[i - 1]

    if letter == 'c':
        if len(plus_num) != 2 or len(minus_num) != 1 or plus_den or minus_den:
            raise NoMatch(f"z{i} factors do not have the c-form shape")
        kappa = minus_num[0][1]
        if kappa == GammaArg():
            raise NoMatch(f"degenerate c-form on z{i}: both candidates are Γ(-z{i})")
        alpha, beta = plus_num[0][1], plus_num[1][1]
        gauss = (alpha, beta, kappa + alpha + beta)
        u = Sub(ONE, kernel)
        positions = [p for p, _ in plus_num + minus_num]
    elif letter in "abde":
        if len(plus_num) != 2 or len(plus_den) != 1 or minus_num or minus_den:
            raise NoMatch(f"z{i} factors do not have the {letter}-form shape")
        alpha, beta = plus_num[0][1], plus_num[1][1]
        gamma = plus_den[0][1]
        if letter == 'a':
            gauss, u = (alpha, beta, gamma), Neg(kernel)
        elif letter == 'b':
            gauss, u = (gamma - alpha, gamma - beta, gamma), Neg(kernel)
        elif letter == 'd':
            gauss, u = (alpha, gamma - beta, gamma), Div(kernel, Add(ONE, kernel))
        else:
            gauss, u = (gamma - beta, alpha, gamma), Div(kernel, Add(ONE, kernel))
        positions = [p for p, _ in plus_num + plus_den]
    else:
        raise NoMatch(f"'{letter}' is not a single-variable form")

    return Extraction(letter, (i,), tuple(sorted(positions + [bare[i]])),
                      gauss=gauss, argument=simplify_basic(u))


# ---------------------------------------------------------------------------
# Pair forms
# ---------------------------------------------------------------------------

def _pair_form(letter: str, i: int, j: int, ext: Extraction) -> FormInstance:
    b, bp = ext.b, ext.b_prime
    Ki, Kj = ext.pair_kernels
    s, t = GammaArg.var(i), GammaArg.var(j)
    st = s + t
    bb = b + bp
    if letter == 'k':
        gammas = tuple((a + st, NUM) for a in ext.joint_num) + tuple((c + st, DEN) for c in ext.joint_den) \
            + ((b + s, NUM), (bp + t, NUM))
        return FormInstance(gammas, (Ki, Kj), (), ())
    if letter == 'l':
        gammas = tuple((a + st, NUM) for a in ext.joint_num) + tuple((c + st, DEN) for c in ext.joint_den) \
            + ((bb + st, NUM), (b + s, NUM), (bb + s, DEN))
        kernels = (simplify_basic(Sub(Ki, Kj)), Kj)
        return FormInstance(gammas, kernels, ((bp, NUM),), ())
    if letter == 'm':
        gammas = tuple((a + t, NUM) for a in ext.joint_num) + tuple((c + t, DEN) for c in ext.joint_den) \
            + ((bb + st, NUM), (bp + s, NUM), (bb + s, DEN))
        kernels = (simplify_basic(Div(Sub(Ki, Kj), Kj)), Ki)
        return FormInstance(gammas, kernels, ((b, NUM),), ((simplify_basic(Div(Ki, Kj)), bp),))
    raise NoMatch(f"'{letter}' is not a pair form")


def _match_pair(m: MBIntegral, i: int, j: int, letter: str) -> Extraction:
    if i == j:
        raise NoMatch("pair steps need two distinct variables")
    bare, rest = _split_by_coefficient(m, (i, j))
    groups: Dict[Tuple[Side, Tuple[int, int]], List[Tuple[int, GammaArg]]] = {}
    for pos, g in rest:
        shape = (g.arg.coeff(i), g.arg.coeff(j))
        if shape not in ((1, 1), (1, 0), (0, 1)):
            raise NoMatch(f"{g.to_text()} does not fit a pair form on (z{i}, z{j})")
        groups.setdefault((g.side, shape), []).append((pos, g.arg.without(i, j)))
    joint_num = groups.get((NUM, (1, 1)), [])
    joint_den = groups.get((DEN, (1, 1)), [])
    s_num = groups.get((NUM, (1, 0)), [])
    s_den = groups.get((DEN, (1, 0)), [])
    t_num = groups.get((NUM, (0, 1)), [])
    t_den = groups.get((DEN, (0, 1)), [])
    Li, Lj = m.kernels[i - 1], m.kernels[j - 1]

    if letter == 'k':
        if len(s_num) != 1 or len(t_num) != 1 or s_den or t_den:
            raise NoMatch(f"(z{i}, z{j}) factors do not have the F1-type shape")
        b, bp = s_num[0][1], t_num[0][1]
        a_list, c_list = joint_num, joint_den
        kernels = (Li, Lj)
    elif letter == 'l':
        if len(s_num) != 1 or len(s_den) != 1 or t_num or t_den:
            raise NoMatch(f"(z{i}, z{j}) factors do not have the KdF-type shape")
        b, bb = s_num[0][1], s_den[0][1]
        sums = [k for k, (_, arg) in enumerate(joint_num) if arg == bb]
        if not sums:
            raise NoMatch(f"no joint numerator Γ({bb.to_text()}+z{i}+z{j}) in the KdF-type shape")
        bb_entry = joint_num[sums[0]]
        a_list = [entry for k, entry in enumerate(joint_num) if k != sums[0]]
        c_list = joint_den
        bp = bb - b
        kernels = (simplify_basic(Add(Li, Lj)), Lj)
        s_num = s_num + s_den + [bb_entry]
    elif letter == 'm':
        if len(s_num) != 1 or len(s_den) != 1 or len(joint_num) != 1 or joint_den:
            raise NoMatch(f"(z{i}, z{j}) factors do not have the F2-type shape")
        bp, bb = s_num[0][1], s_den[0][1]
        if joint_num[0][1] != bb:
            raise NoMatch(f"joint numerator of the F2-type shape is not Γ({bb.to_text()}+z{i}+z{j})")
        b = bb - bp
        a_list, c_list = t_num, t_den
        kernels = (Lj, simplify_basic(Div(Lj, Add(ONE, Li))))
        s_num = s_num + s_den + joint_num
        joint_num = []
        t_num = t_den = []
    else:
        raise NoMatch(f"'{letter}' is not a pair form")

    positions = [p for p, _ in a_list + c_list + s_num + t_num + joint_num + joint_den]
    positions += [bare[i], bare[j]]
    return Extraction(letter, (i, j), tuple(sorted(set(positions))), b=b, b_prime=bp,
                      joint_num=tuple(arg for _, arg in a_list), joint_den=tuple(arg for _, arg in c_list),
                      pair_kernels=kernels)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _source_instance(letter: str, ext: Extraction) -> FormInstance:
    if ext.gauss is not None:
        return _single_form(letter, ext.vars[0], *ext.gauss, ext.argument)
    return _pair_form(letter, ext.vars[0], ext.vars[1], ext)


def _check_extraction(m: MBIntegral, ext: Extraction) -> None:
    """The source form rebuilt from the extraction must give back the matched factors."""
    rebuilt = _source_instance(ext.letter, ext)
    expected = Counter((m.gammas[pos].arg, m.gammas[pos].side) for pos in ext.matched)
    bare = Counter((GammaArg.var(i, -1), NUM) for i in ext.vars)
    if Counter(rebuilt.gammas) + bare != expected:
        raise AmbiguousMatch(f"extraction {ext.describe()} does not reproduce the matched factors")
    for index, kernel in zip(ext.vars, rebuilt.kernels):
        if not expr_equal(kernel, m.kernels[index - 1]):
            raise AmbiguousMatch(f"extraction {ext.describe()} does not reproduce kernel of z{index}")


def match_form(m: MBIntegral, vars: Sequence[int], letter: str) -> Extraction:
    """
    Read the parameters of a source form off the factors of ``m`` involving ``vars``.

    Numerator candidates are taken in the order they occur in the Gamma list:
    the first matched numerator plays α, the second β.

    Raises:
        NoMatch: the factors do not have the shape of the form
        AmbiguousMatch: the extraction does not rebuild the matched factors (internal error)
    """
    vars = tuple(vars)
    for index in vars:
        if not 1 <= index <= m.nvars:
            raise NoMatch(f"z{index} is not a variable of a {m.nvars}-fold integral")
    if len(vars) == 1 and letter in SINGLE_LETTERS:
        ext = _match_single(m, vars[0], letter)
    elif len(vars) == 2 and letter in PAIR_LETTERS:
        ext = _match_pair(m, vars[0], vars[1], letter)
    else:
        raise NoMatch(f"letter '{letter}' does not apply to {len(vars)} variable(s)")
    _check_extraction(m, ext)
    return ext


def _describe_factor(constants: Sequence[SideArg], powers: Sequence[RawPower]) -> str:
    parts = [f"({to_text(base)})^({exponent.to_text()})" for base, exponent in powers]
    nums = [f"Γ({arg.to_text()})" for arg, side in constants if side is NUM]
    dens = [f"Γ({arg.to_text()})" for arg, side in constants if side is DEN]
    if nums or dens:
        parts.append(f"{''.join(nums) or '1'}/({''.join(dens)})" if dens else ''.join(nums))
    return ' '.join(parts) if parts else '1'


def apply_step_detailed(m: MBIntegral, step: TransformStep) -> Tuple[MBIntegral, Extraction, str]:
    """
    Apply one step and also return the extraction and the relating prefactor as text.
    """
    if step.target.lower() not in (SINGLE_LETTERS if len(step.vars) == 1 else PAIR_LETTERS):
        raise NoMatch(f"target '{step.target}' does not apply to {len(step.vars)} variable(s)")
    ext = match_form(m, step.vars, step.source)
    source = _source_instance(step.source, ext)
    target = _source_instance(step.target.lower(), ext)

    combined = list(target.constants) + [(arg, side.flipped()) for arg, side in source.constants]
    nums, dens = cancel_pairs([a for a, s in combined if s is NUM], [a for a, s in combined if s is DEN])
    constants = [(a, NUM) for a in nums] + [(a, DEN) for a in dens]
    raw_powers = list(target.powers) + [(base, -exponent) for base, exponent in source.powers]
    raw_powers = [(base, exponent) for base, exponent in raw_powers if exponent != GammaArg()]

    kept = [g for pos, g in enumerate(m.gammas) if pos not in ext.matched]
    kept += [GammaFactor(GammaArg.var(i, -1)) for i in step.vars]
    integrand, ratios = route_gammas(list(target.gammas) + constants)
    kernels = list(m.kernels)
    for index, kernel in zip(step.vars, target.kernels):
        kernels[index - 1] = kernel
    result = MBIntegral(m.nvars, tuple(kernels), tuple(kept + integrand),
                        m.prefactor.with_ratios(ratios))
    result = canonicalize(fold_exponents(result, raw_powers))
    factor = _describe_factor(constants, raw_powers)
    logger.debug(f"step {step.label}: {ext.describe()}; factor {factor}")
    return result, ext, factor


def apply_step(m: MBIntegral, step: TransformStep) -> MBIntegral:
    """
    Rewrite the source form on ``step.vars`` into the target form.

    Raises:
        NoMatch: the source form does not match
    """
    return apply_step_detailed(m, step)[0]


def figure_reading(m: MBIntegral, step: TransformStep) -> Optional[TransformStep]:
    """
    Alternate reading of a pair step whose printed letters do not match.

    Printed labels such as 23lK denote the step read here as 23kL: find the
    pair form that does match; if it is one of the printed letters the target
    is the other printed letter, otherwise the printed target is kept.
    """
    if not step.is_pair:
        return None
    printed = {step.source, step.target.lower()}
    for letter in PAIR_LETTERS:
        if letter == step.source:
            continue
        try:
            match_form(m, step.vars, letter)
        except NoMatch:
            continue
        if letter in printed:
            target = (printed - {letter}).pop().upper()
        else:
            target = step.target
        if target.lower() != letter:
            return TransformStep(step.vars, letter, target)
    return None


def barnes_first_lemma_reduce(m: MBIntegral, var: int) -> MBIntegral:
    """
    Evaluate the z_var integral by the first Barnes lemma,

        ∫ Γ(a+s)Γ(b+s)Γ(c-s)Γ(d-s) ds/(2πi) = Γ(a+c)Γ(a+d)Γ(b+c)Γ(b+d)/Γ(a+b+c+d),

    and renumber the remaining variables.

    Raises:
        NoMatch: the z_var factors or kernel do not fit the lemma
    """
    if not 1 <= var <= m.nvars:
        raise NoMatch(f"z{var} is not a variable of a {m.nvars}-fold integral")
    if not expr_equal(m.kernels[var - 1], ONE):
        raise NoMatch(f"kernel of z{var} is not 1")
    plus, minus, kept = [], [], []
    for g in m.gammas:
        coeff = g.arg.coeff(var)
        if coeff == 0:
            kept.append(g)
        elif g.side is DEN or abs(coeff) != 1:
            raise NoMatch(f"{g.to_text()} does not fit the first Barnes lemma")
        elif coeff == 1:
            plus.append(g.arg.without(var))
        else:
            minus.append(g.arg.without(var))
    if len(plus) != 2 or len(minus) != 2:
        raise NoMatch(f"z{var} needs two Γ(·+z) and two Γ(·-z) factors")
    a, b = plus
    c, d = minus
    closed = [(a + c, NUM), (a + d, NUM), (b + c, NUM), (b + d, NUM), (a + b + c + d, DEN)]
    integrand, ratios = route_gammas(closed)

    renumber = {k: (k if k < var else k - 1) for k in range(1, m.nvars + 1) if k != var}
    gammas = tuple(GammaFactor(g.arg.renumber(renumber), g.side) for g in kept + integrand)
    kernels = tuple(k for index, k in enumerate(m.kernels, start=1) if index != var)
    return canonicalize(MBIntegral(m.nvars - 1, kernels, gammas, m.prefactor.with_ratios(ratios)))


def enumerate_steps(m: MBIntegral) -> List[TransformStep]:
    """
    Every non-identity step whose source form matches, ordered by variables,
    source letter and target letter.
    """
    steps = []
    candidates = [((i,), ENUMERATED_SINGLE_SOURCES, SINGLE_LETTERS) for i in range(1, m.nvars + 1)]
    candidates += [(pair, ENUMERATED_PAIR_SOURCES, PAIR_LETTERS)
                   for pair in permutations(range(1, m.nvars + 1), 2)]
    for vars, sources, letters in candidates:
        for source in sources:
            try:
                match_form(m, vars, source)
            except NoMatch:
                continue
            steps.extend(TransformStep(vars, source, target.upper()) for target in letters if target != source)
    return sorted(steps, key=lambda s: (s.vars, s.source, s.target))

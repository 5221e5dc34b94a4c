"""Canonical text encodings of functional and policy specs.

Grammar: ``name`` or ``name:key=value,key=value,...``.  Values are numbers,
bare words, kernel references like ``power:1``, nested functionals in
parentheses (``inner=(gini-rel:delta=0.25)``), or signed atom lists written
``u1@w1+u2@w2`` for the weighting measures of linear inequality indices.

Examples: ``gini-welfare``, ``atkinson-welfare:eps=0.5``,
``quantile:alpha=0.5,r=1``, ``fgt:z0=0.5,delta=0,lambda=power:1``,
``fucb:beta=2.01``, ``etc-t:delta=0.3,alpha=0.1,eta=0.1``.
"""

from __future__ import annotations

import math

from . import functionals as fn
from . import policies as pol
from .ecdf import SupportInterval
from .errors import ConfigError

__all__ = [
    "parse_functional",
    "encode_functional",
    "parse_policy_variant",
    "encode_policy_variant",
]


def _split_top(s: str, sep: str):
    """Split on sep outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced parentheses in {s!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ConfigError(f"unbalanced parentheses in {s!r}")
    parts.append("".join(cur))
    return parts


def _parse_params(body: str) -> dict:
    params = {}
    if not body:
        return params
    for item in _split_top(body, ","):
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, _, val = item.partition("=")
        key = key.strip()
        if key in params:
            raise ConfigError(f"duplicate key {key!r}")
        params[key] = val.strip()
    return params


def _num(params: dict, key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise ConfigError(f"missing parameter {key!r}")
        return default
    try:
        return float(params.pop(key))
    except ValueError as exc:
        raise ConfigError(f"parameter {key!r} is not a number") from exc


def _word(params: dict, key: str, default=None) -> str:
    if key not in params:
        if default is None:
            raise ConfigError(f"missing parameter {key!r}")
        return default
    return params.pop(key)


def _atoms(params: dict, key: str) -> tuple:
    raw = _word(params, key)
    pairs = []
    for chunk in raw.split("+"):
        if "@" not in chunk:
            raise ConfigError(f"atom list entries look like u@w, got {chunk!r}")
        u, _, w = chunk.partition("@")
        pairs.append((float(u), float(w)))
    return tuple(pairs)


def _fmt(v: float) -> str:
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _done(params: dict, name: str):
    if params:
        raise ConfigError(f"unknown parameter(s) {sorted(params)} for {name!r}")


def _parse_povline(params: dict, support: SupportInterval) -> fn.PovertyLine:
    m = _word(params, "m", "mean")
    z0 = _num(params, "z0")
    delta = _num(params, "delta")
    r = _num(params, "r", math.nan)
    return fn.PovertyLine(
        support, m=m, z0=z0, delta=delta, r=None if math.isnan(r) else r
    )


def parse_functional(text: str, support: SupportInterval) -> fn.FunctionalSpec:
    text = text.strip()
    name, _, body = text.partition(":")
    name = name.strip()
    params = _parse_params(body)
    try:
        if name == "mean":
            spec = fn.Mean(support)
        elif name == "pmean":
            spec = fn.PMean(support, p=_num(params, "p"))
        elif name == "variance":
            spec = fn.Variance(support)
        elif name == "gini-mean-diff":
            spec = fn.GiniMeanDiff(support)
        elif name == "gini-abs":
            spec = fn.GiniAbs(support)
        elif name == "gini-rel":
            spec = fn.GiniRel(support, delta=_num(params, "delta"))
        elif name == "schutz-abs":
            spec = fn.SchutzAbs(support)
        elif name == "schutz-rel":
            spec = fn.SchutzRel(support, s=_num(params, "s"), delta=_num(params, "delta"))
        elif name == "entropy":
            c = _num(params, "c")
            delta = _num(params, "delta", math.nan)
            spec = fn.EntropyGE(support, c=c, delta=None if math.isnan(delta) else delta)
        elif name == "atkinson":
            eps = _num(params, "eps")
            delta = _num(params, "delta", math.nan)
            spec = fn.Atkinson(support, eps=eps, delta=None if math.isnan(delta) else delta)
        elif name == "atkinson-welfare":
            spec = fn.AtkinsonWelfare(support, eps=_num(params, "eps"))
        elif name == "kolm":
            spec = fn.Kolm(support, kappa=_num(params, "kappa"))
        elif name == "gini-welfare":
            spec = fn.GiniWelfare(support)
        elif name == "schutz-welfare":
            spec = fn.SchutzWelfare(support)
        elif name in ("welfare-rel", "welfare-abs"):
            inner_text = _word(params, "inner")
            if not (inner_text.startswith("(") and inner_text.endswith(")")):
                raise ConfigError("inner functional must be parenthesized")
            inner = parse_functional(inner_text[1:-1], support)
            if name == "welfare-rel":
                spec = fn.WelfareFromRel(support, inner=inner, gamma=_num(params, "gamma", 1.0))
            else:
                spec = fn.WelfareFromAbs(support, inner=inner)
        elif name == "quantile":
            spec = fn.Quantile(support, alpha=_num(params, "alpha"), r=_num(params, "r"))
        elif name == "lorenz-q":
            spec = fn.LorenzQ(support, u=_num(params, "u"), r=_num(params, "r"))
        elif name == "lorenz-l":
            spec = fn.LorenzOrdinate(support, u=_num(params, "u"), r=_num(params, "r"))
        elif name == "lin-ineq":
            spec = fn.LinearInequality(support, atoms=_atoms(params, "w"), r=_num(params, "r"))
        elif name == "abs-lin-ineq":
            spec = fn.AbsLinearInequality(support, atoms=_atoms(params, "w"), r=_num(params, "r"))
        elif name == "trimmed":
            kernel = _word(params, "kernel")
            p = 1.0
            if ":" in kernel:
                kernel, _, parg = kernel.partition(":")
                p = float(parg)
            u = _num(params, "u", math.nan)
            ck = _num(params, "ck", math.nan)
            spec = fn.TrimmedU(
                support,
                kernel=kernel,
                p=p,
                alpha=_num(params, "alpha"),
                side=_word(params, "side", "lower"),
                r=_num(params, "r"),
                kappa_dens=_num(params, "kappa"),
                u_bound=None if math.isnan(u) else u,
                c_kernel=None if math.isnan(ck) else ck,
            )
        elif name == "povline":
            spec = _parse_povline(params, support)
        elif name == "headcount":
            s = _num(params, "s")
            line = _parse_povline(params, support)
            spec = fn.Headcount(support, line=line, s=s)
        elif name == "sen":
            kappa = _num(params, "kappa")
            s = _num(params, "s")
            zstar = _num(params, "zstar", math.nan)
            line = _parse_povline(params, support)
            spec = fn.SenKakwani(
                support, line=line, kappa=kappa, s=s,
                z_star=None if math.isnan(zstar) else zstar,
            )
        elif name == "fgt":
            lam = _word(params, "lambda", "power:1")
            lam_name, _, lam_p = lam.partition(":")
            if lam_name != "power":
                raise ConfigError(f"fgt lambda must be power:p, got {lam!r}")
            zstar = _num(params, "zstar", math.nan)
            line = _parse_povline(params, support)
            spec = fn.FGT(
                support, line=line, p=float(lam_p or 1.0),
                z_star=None if math.isnan(zstar) else zstar,
            )
        else:
            raise ConfigError(f"unknown functional {name!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid functional {text!r}: {exc}") from exc
    _done(params, name)
    return spec


def _encode_povline(line: fn.PovertyLine) -> str:
    parts = [f"z0={_fmt(line.z0)}", f"delta={_fmt(line.delta)}", f"m={line.m}"]
    if line.r is not None:
        parts.append(f"r={_fmt(line.r)}")
    return ",".join(parts)


def encode_functional(spec: fn.FunctionalSpec) -> str:
    n = spec.name
    if isinstance(spec, (fn.Mean, fn.Variance, fn.GiniMeanDiff, fn.GiniAbs,
                         fn.SchutzAbs, fn.GiniWelfare, fn.SchutzWelfare)):
        return n
    if isinstance(spec, fn.PMean):
        return f"{n}:p={_fmt(spec.p)}"
    if isinstance(spec, fn.GiniRel):
        return f"{n}:delta={_fmt(spec.delta)}"
    if isinstance(spec, fn.SchutzRel):
        return f"{n}:s={_fmt(spec.s)},delta={_fmt(spec.delta)}"
    if isinstance(spec, fn.EntropyGE):
        out = f"{n}:c={_fmt(spec.c)}"
        return out + (f",delta={_fmt(spec.delta)}" if spec.delta is not None else "")
    if isinstance(spec, fn.Atkinson):
        out = f"{n}:eps={_fmt(spec.eps)}"
        return out + (f",delta={_fmt(spec.delta)}" if spec.delta is not None else "")
    if isinstance(spec, fn.AtkinsonWelfare):
        return f"{n}:eps={_fmt(spec.eps)}"
    if isinstance(spec, fn.Kolm):
        return f"{n}:kappa={_fmt(spec.kappa)}"
    if isinstance(spec, fn.WelfareFromRel):
        return f"{n}:inner=({encode_functional(spec.inner)}),gamma={_fmt(spec.gamma)}"
    if isinstance(spec, fn.WelfareFromAbs):
        return f"{n}:inner=({encode_functional(spec.inner)})"
    if isinstance(spec, fn.Quantile):
        return f"{n}:alpha={_fmt(spec.alpha)},r={_fmt(spec.r)}"
    if isinstance(spec, fn.LorenzQ) or isinstance(spec, fn.LorenzOrdinate):
        return f"{n}:u={_fmt(spec.u)},r={_fmt(spec.r)}"
    if isinstance(spec, (fn.LinearInequality, fn.AbsLinearInequality)):
        atoms = "+".join(f"{_fmt(u)}@{_fmt(w)}" for u, w in spec.atoms)
        return f"{n}:w={atoms},r={_fmt(spec.r)}"
    if isinstance(spec, fn.TrimmedU):
        kern = spec.kernel if spec.kernel != "power" else f"power:{_fmt(spec.p)}"
        out = (
            f"{n}:kernel={kern},alpha={_fmt(spec.alpha)},side={spec.side},"
            f"r={_fmt(spec.r)},kappa={_fmt(spec.kappa_dens)}"
        )
        if spec.u_bound is not None:
            out += f",u={_fmt(spec.u_bound)}"
        if spec.c_kernel is not None:
            out += f",ck={_fmt(spec.c_kernel)}"
        return out
    if isinstance(spec, fn.PovertyLine):
        return f"{n}:{_encode_povline(spec)}"
    if isinstance(spec, fn.Headcount):
        return f"{n}:{_encode_povline(spec.line)},s={_fmt(spec.s)}"
    if isinstance(spec, fn.SenKakwani):
        return (
            f"{n}:{_encode_povline(spec.line)},kappa={_fmt(spec.kappa)},"
            f"s={_fmt(spec.s)},zstar={_fmt(spec.z_star)}"
        )
    if isinstance(spec, fn.FGT):
        return (
            f"{n}:{_encode_povline(spec.line)},lambda=power:{_fmt(spec.p)},"
            f"zstar={_fmt(spec.z_star)}"
        )
    raise ConfigError(f"cannot encode functional {spec!r}")


def parse_policy_variant(text: str):
    text = text.strip()
    name, _, body = text.partition(":")
    name = name.strip()
    params = _parse_params(body)
    try:
        if name == "fucb":
            raw = params.pop("beta", None)
            if raw is None:
                v = pol.FUCB()
            elif raw == "minimax":
                v = pol.FUCB(pol.BETA_FUCB_MINIMAX)
            else:
                v = pol.FUCB(float(raw))
        elif name == "famoss":
            v = pol.FaMOSS(_num(params, "beta", pol.BETA_FAMOSS_DEFAULT))
        elif name == "etc-horizon":
            v = pol.ETCHorizon(_word(params, "explore", "uniform-random"))
        elif name == "etc-es":
            v = pol.ETCES(_num(params, "delta"), _word(params, "explore", "cyclic"))
        elif name == "etc-t":
            v = pol.ETCT(
                _num(params, "delta"),
                _num(params, "alpha", 0.1),
                _num(params, "eta", 0.1),
                _word(params, "explore", "cyclic"),
            )
        elif name == "generic-ucb":
            v = pol.GenericUCB(_word(params, "rho"), _num(params, "beta"))
        else:
            raise ConfigError(f"unknown policy {name!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid policy {text!r}: {exc}") from exc
    _done(params, name)
    return v


def encode_policy_variant(v) -> str:
    if isinstance(v, pol.FUCB):
        return f"fucb:beta={_fmt(v.beta)}"
    if isinstance(v, pol.FaMOSS):
        return f"famoss:beta={_fmt(v.beta)}"
    if isinstance(v, pol.ETCHorizon):
        return f"etc-horizon:explore={v.exploration}"
    if isinstance(v, pol.ETCES):
        return f"etc-es:delta={_fmt(v.delta)},explore={v.exploration}"
    if isinstance(v, pol.ETCT):
        return (
            f"etc-t:delta={_fmt(v.delta)},alpha={_fmt(v.alpha)},"
            f"eta={_fmt(v.eta)},explore={v.exploration}"
        )
    if isinstance(v, pol.GenericUCB):
        return f"generic-ucb:rho={v.rho},beta={_fmt(v.beta)}"
    raise ConfigError(f"cannot encode policy {v!r}")

"""Random instance generation, pair construction, campaign driver.

Bodies are drawn as symmetric direction sets with a minimum angular
separation plus uniform heights, then repaired: any empty facet has its
height pulled down to just below its support number until every facet
is nonempty and the body is simple. Pairs come in two flavors:

* perturb: a-type-preserving random height perturbation of K.
* independent merge: a second random body L0 is drawn, both bodies are
  re-expressed over the union of the two normal lists, and each body's
  heights at the foreign normals are jittered off the exact support
  values (which would be degenerate). Jittering down activates the
  foreign facet (tiny cut); jittering K's up leaves it redundant, which
  guarantees a-type events along the lambda path since L carries the
  facet and K does not.

The campaign driver runs instances over a p-list, collects local
verdicts and scan summaries into deterministic CSV/JSON reports, and
honors LPBM_THREADS for process parallelism (results are aggregated in
instance order, so outputs are byte-identical at any worker count).
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bodies import (
    SupportVector,
    dumps_canonical,
    from_pairs,
    write_json_atomic,
)
from .combine import check_p, path_from_bodies
from .errors import BadParameter, GenerationFailed, LpbmError
from .geometry import enumerate_geometry, perturb_within_atype
from .localform import evaluate_pair
from .mixed import mixed_volume_1
from .scan import scan

_HEIGHT_RANGE = (0.5, 2.0)


def _random_directions(dim: int, half: int, rng) -> np.ndarray:
    if dim == 2:
        min_gap = 0.3 * np.pi / half
        for _ in range(400):
            ang = np.sort(rng.uniform(0.0, np.pi, half))
            gaps = np.diff(np.concatenate([ang, [ang[0] + np.pi]]))
            if np.min(gaps) >= min_gap:
                return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    else:
        # separation covers antipodes too: |dot| capped
        max_dot = 0.98 if half * (dim - 1) <= 24 else 0.995
        for _ in range(400):
            g = rng.standard_normal((half, dim))
            dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
            dots = np.abs(dirs @ dirs.T)
            np.fill_diagonal(dots, 0.0)
            if np.max(dots) <= max_dot:
                return dirs
    raise GenerationFailed(
        f"could not draw {half} separated directions in dimension {dim}")


def random_symmetric_body(dim: int, facets: int, seed=0, retry_cap: int = 60) -> SupportVector:
    """Random simple symmetric body with all listed facets nonempty.

    facets counts both members of each antipodal pair and must be even,
    >= 2*dim. seed may be an integer or a numpy Generator (consumed).
    """
    if facets % 2 != 0:
        raise BadParameter(f"facets must be even, got {facets}")
    if facets < 2 * dim:
        raise BadParameter(
            f"need at least {2 * dim} facets in dimension {dim}, got {facets}")
    rng = np.random.default_rng(seed)
    half = facets // 2
    for _ in range(retry_cap):
        dirs = _random_directions(dim, half, rng)
        heights = rng.uniform(*_HEIGHT_RANGE, size=half)
        sv = from_pairs(dirs, heights)
        for _ in range(12):  # shrink-empty repair passes
            try:
                geom = enumerate_geometry(sv)
            except LpbmError:
                break
            if geom.nonempty.all():
                return sv
            supp = geom.support_numbers
            for k in np.flatnonzero(~geom.nonempty[::2] | ~geom.nonempty[1::2]):
                heights[k] = 0.99 * min(supp[2 * k], supp[2 * k + 1])
            sv = from_pairs(dirs, heights)
    raise GenerationFailed(
        f"no simple all-facets body after {retry_cap} draws "
        f"(dim {dim}, facets {facets})")


def _support_on(geom, directions: np.ndarray) -> np.ndarray:
    return (geom.vertices @ directions.T).max(axis=0)


def merge_pair(
    k_sv: SupportVector,
    l_sv: SupportVector,
    magnitude: float = 0.05,
    seed=0,
    activate: str = "both",
    retry_cap: int = 20,
):
    """Re-express two bodies over the union of their normal lists.

    Foreign heights start from the exact support numbers and are
    jittered by factors 1 -/+ U(0.25, 0.75)*magnitude: down (active) on
    the L side always and on the K side for activate="both"; up
    (redundant, empty facet) on the K side for activate="target", which
    forces facet-activation events along any K -> L path. Nearby cuts
    can shadow each other, so bodies that must be fully active go
    through a pull-down repair (empty pairs get their heights lowered
    below the current support number, iterated); heights at a body's
    own normals are kept exact unless that repair has to trim them. A
    failed attempt is retried with fresh jitters at reduced magnitude.
    In target mode the K body is untouched: its foreign constraints
    stay strictly redundant.
    """
    if k_sv.dim != l_sv.dim:
        raise BadParameter("bodies live in different dimensions")
    if not 0.0 < magnitude < 1.0:
        raise BadParameter(f"magnitude must lie in (0, 1), got {magnitude}")
    if activate not in ("both", "target"):
        raise BadParameter(f"activate must be 'both' or 'target', got {activate!r}")
    rng = np.random.default_rng(seed)
    k_reps, l_reps = k_sv.normals[0::2], l_sv.normals[0::2]
    foreign = []
    for d in l_reps:
        dist = np.minimum(
            np.linalg.norm(k_reps - d, axis=1), np.linalg.norm(k_reps + d, axis=1))
        if np.min(dist) > 1e-9:
            foreign.append(d)
    foreign = np.array(foreign).reshape(-1, k_sv.dim)
    reps = np.vstack([k_reps, foreign])

    gk, gl = enumerate_geometry(k_sv), enumerate_geometry(l_sv)
    supp_k = _support_on(gk, reps)
    supp_l = _support_on(gl, reps)
    nk = k_reps.shape[0]
    l_own = _own_mask(l_reps, reps)

    mag = float(magnitude)
    for _ in range(retry_cap):
        jit_k = rng.uniform(0.25, 0.75, size=reps.shape[0])
        jit_l = rng.uniform(0.25, 0.75, size=reps.shape[0])
        if activate == "both":
            hk = np.concatenate(
                [k_sv.heights[0::2], supp_k[nk:] * (1.0 - jit_k[nk:] * mag)])
            km = _pull_active(reps, hk)
        else:
            # redundant foreign constraints: the body stays K exactly
            hk = np.concatenate(
                [k_sv.heights[0::2], supp_k[nk:] * (1.0 + jit_k[nk:] * mag)])
            km = _enumerable(reps, hk)
        hl = np.where(l_own, supp_l, supp_l * (1.0 - jit_l * mag))
        lm = _pull_active(reps, hl)
        if km is not None and lm is not None:
            return km, lm
        mag *= 0.75
    raise GenerationFailed(
        f"merge failed after {retry_cap} jitter retries (activate={activate})")


def _enumerable(reps, h_half):
    try:
        sv = from_pairs(reps, h_half)
        enumerate_geometry(sv)
        return sv
    except LpbmError:
        return None


def _pull_active(reps, h_half, rounds: int = 14):
    """Pull heights of empty facet pairs just below their support
    numbers until every facet is nonempty. Resurrection cuts can shadow
    a near-parallel facet in turn, so the pull fraction decays each
    round; it must stay well above the incidence slack. None when the
    loop fails (caller retries with fresh jitters)."""
    h = np.asarray(h_half, dtype=float).copy()
    frac = 1e-3
    for _ in range(rounds):
        try:
            sv = from_pairs(reps, h)
            g = enumerate_geometry(sv)
        except LpbmError:
            return None
        pair_empty = ~(g.nonempty[0::2] & g.nonempty[1::2])
        if not pair_empty.any():
            return sv
        supp = g.support_numbers
        for k in np.flatnonzero(pair_empty):
            h[k] = min(supp[2 * k], supp[2 * k + 1]) * (1.0 - frac)
        frac *= 0.5
    return None


def _own_mask(dirs: np.ndarray, reps: np.ndarray) -> np.ndarray:
    # reps rows that coincide (up to sign) with some row of dirs
    out = np.zeros(reps.shape[0], dtype=bool)
    for k, r in enumerate(reps):
        dist = np.minimum(
            np.linalg.norm(dirs - r, axis=1), np.linalg.norm(dirs + r, axis=1))
        out[k] = bool(np.min(dist) <= 1e-9)
    return out


def independent_merge_pair(
    k_sv: SupportVector,
    facets: int,
    magnitude: float = 0.05,
    seed=0,
    activate: str = "both",
):
    """Draw a fresh body and merge it with K; returns (K', L') over the
    union normal list.

    Draws whose directions come too close to K's are rejected: a merged
    list with near-parallel entries only admits coexisting facets inside
    a sliver of height space, which defeats the jittering.
    """
    rng = np.random.default_rng(seed)
    k_reps = k_sv.normals[0::2]
    for _ in range(60):
        l0 = random_symmetric_body(k_sv.dim, facets, rng)
        if np.abs(l0.normals[0::2] @ k_reps.T).max() <= 0.995:
            break
    return merge_pair(k_sv, l0, magnitude, rng, activate)


# -- campaign ----------------------------------------------------------------

def worker_count(env=None) -> int:
    """LPBM_THREADS: unset/empty -> 1, '0' -> cpu count, k -> k."""
    env = os.environ if env is None else env
    raw = env.get("LPBM_THREADS", "").strip()
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise BadParameter(f"LPBM_THREADS must be an integer, got {raw!r}")
    if k < 0:
        raise BadParameter(f"LPBM_THREADS must be >= 0, got {k}")
    return k if k > 0 else (os.cpu_count() or 1)


@dataclass
class Campaign:
    """Configuration of a randomized verification campaign."""

    dim: int = 2
    facets: int = 8
    instances: int = 20
    p_list: tuple = (0.0,)
    seed: int = 0
    pair_mode: str = "perturb"  # or "independent-merge"
    magnitude: float = 0.1
    pair_facets: int = None
    activate: str = "both"
    scan_grid: int = 0  # 0 = skip scans
    event_tol: float = 1e-10
    tol: float = 1e-9
    out_csv: str = None
    out_json: str = None

    def __post_init__(self):
        if self.pair_mode not in ("perturb", "independent-merge"):
            raise BadParameter(
                f"pair_mode must be 'perturb' or 'independent-merge', "
                f"got {self.pair_mode!r}")
        if self.instances < 1:
            raise BadParameter("instances must be >= 1")
        if self.scan_grid and self.scan_grid < 3:
            raise BadParameter("scan_grid must be 0 or >= 3")
        self.p_list = tuple(check_p(p) for p in self.p_list)


_CSV_HEADER = "instance,p,lhs,scale,max_eig,kernel_residual,passed,events,concave"


def _instance_rows(cfg: Campaign, index: int, seed_seq) -> dict:
    """One campaign instance: generate, pair, verdicts, optional scans."""
    rng = np.random.default_rng(seed_seq)
    try:
        k_sv = random_symmetric_body(cfg.dim, cfg.facets, rng)
        if cfg.pair_mode == "perturb":
            l_sv = perturb_within_atype(k_sv, cfg.magnitude, rng)
            k_used = k_sv
        else:
            k_used, l_sv = merge_pair(
                k_sv,
                random_symmetric_body(cfg.dim, cfg.pair_facets or cfg.facets, rng),
                cfg.magnitude, rng, cfg.activate)
        geom = enumerate_geometry(k_used)
        rows = []
        for p in cfg.p_list:
            row = {"instance": index, "p": p, "lhs": None, "scale": None,
                   "max_eig": None, "kernel_residual": None, "passed": None,
                   "events": None, "concave": None}
            if geom.nonempty.all():
                verdict = evaluate_pair(geom, l_sv, p, tol=cfg.tol)
                v1 = mixed_volume_1(l_sv, geom)
                row.update(
                    lhs=verdict.lhs,
                    scale=cfg.dim * (cfg.dim - p) * v1 * v1,
                    max_eig=verdict.max_eig,
                    kernel_residual=verdict.kernel_residual,
                    passed=verdict.passed,
                )
            if cfg.scan_grid:
                rep = scan(path_from_bodies(k_used, l_sv, p),
                           grid_size=cfg.scan_grid, event_tol=cfg.event_tol)
                row.update(events=len(rep.events), concave=rep.concave)
            rows.append(row)
        return {"index": index, "rows": rows, "error": None}
    except LpbmError as exc:
        return {"index": index, "rows": [],
                "error": f"{type(exc).__name__}: {exc}"}


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_campaign(cfg: Campaign) -> dict:
    """Run all instances, write CSV/JSON if configured, return summary.

    Deterministic for a fixed config: child seeds come from spawning
    SeedSequence(cfg.seed), and results are assembled in instance order
    whatever the worker count.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.instances)
    tasks = [(cfg, i, children[i]) for i in range(cfg.instances)]
    workers = worker_count()
    if workers > 1 and cfg.instances > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_instance_worker, tasks))
    else:
        results = [_instance_worker(t) for t in tasks]
    results.sort(key=lambda r: r["index"])

    all_rows = [row for res in results for row in res["rows"]]
    errors = [{"instance": res["index"], "error": res["error"]}
              for res in results if res["error"]]

    summary = {
        "config": {
            "dim": cfg.dim, "facets": cfg.facets, "instances": cfg.instances,
            "p_list": list(cfg.p_list), "seed": cfg.seed,
            "pair_mode": cfg.pair_mode, "magnitude": cfg.magnitude,
            "pair_facets": cfg.pair_facets, "activate": cfg.activate,
            "scan_grid": cfg.scan_grid, "event_tol": cfg.event_tol,
            "tol": cfg.tol,
        },
        "rows": len(all_rows),
        "errors": errors,
        "per_p": {},
    }
    for p in cfg.p_list:
        rows = [r for r in all_rows if r["p"] == p]
        verd = [r for r in rows if r["passed"] is not None]
        lhs_rel = [r["lhs"] / r["scale"] for r in verd if r["scale"]]
        eigs = [r["max_eig"] for r in verd if r["max_eig"] is not None]
        ev = [r["events"] for r in rows if r["events"] is not None]
        conc = [r["concave"] for r in rows if r["concave"] is not None]
        summary["per_p"][repr(float(p))] = {
            "rows": len(rows),
            "pass_rate": (sum(1 for r in verd if r["passed"]) / len(verd)
                          if verd else None),
            "lhs_rel_max": max(lhs_rel) if lhs_rel else None,
            "lhs_rel_min": min(lhs_rel) if lhs_rel else None,
            "max_eig_max": max(eigs) if eigs else None,
            "events_total": sum(ev) if ev else 0,
            "concave_all": all(conc) if conc else None,
        }
    if cfg.out_csv:
        lines = [_CSV_HEADER]
        for r in all_rows:
            lines.append(",".join(_csv_cell(r[k]) for k in _CSV_HEADER.split(",")))
        _write_text_atomic(cfg.out_csv, "\n".join(lines) + "\n")
    if cfg.out_json:
        write_json_atomic(cfg.out_json, summary)
    return summary


def _instance_worker(task):
    cfg, index, seed_seq = task
    return _instance_rows(cfg, index, seed_seq)


def _write_text_atomic(path, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def campaign_from_dict(payload: dict) -> Campaign:
    """Build a Campaign from a JSON-style dict, rejecting unknown keys."""
    known = {f.name for f in dataclasses.fields(Campaign)}
    unknown = set(payload) - known
    if unknown:
        raise BadParameter(f"unknown campaign keys: {sorted(unknown)}")
    if "p_list" in payload:
        payload = dict(payload)
        payload["p_list"] = tuple(payload["p_list"])
    return Campaign(**payload)


__all__ = [
    "Campaign",
    "campaign_from_dict",
    "independent_merge_pair",
    "merge_pair",
    "random_symmetric_body",
    "run_campaign",
    "worker_count",
    "dumps_canonical",
]

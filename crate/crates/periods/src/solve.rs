//! Simultaneous φ- and Γ-eigenvectors with a certified dimension bracket.

use padic_core::{Character, Matrix, Ring, Scalar, Trunc};
use phigamma::PhiGammaModule;
use robba::{min_bound, Annulus, DifElement, Localizer, RobbaElement, W};

use crate::error::PeriodError;
use crate::formal::{flatten, phi_power_table, Coeffs, FormalSolver};
use crate::threshold::{min_slope, slope_threshold};

/// Digits lost to truncation that a residual may still show.
pub const SLACK: i64 = 2;
/// Default working target N.
pub const DEFAULT_TARGET: i64 = 12;

#[derive(Clone, Debug)]
pub struct PeriodSolution<Q: Scalar> {
    /// S-generators of the eigenspace, as coordinate vectors.
    pub vectors: Vec<Vec<RobbaElement<Q>>>,
    /// Q_p-basis of the eigenspace (equal to `vectors` over Q_p).
    pub span: Vec<Vec<RobbaElement<Q>>>,
    /// Smallest residual w-value over all three equations and all of `span`
    /// (`None` for +∞).
    pub residual_floor: Option<W>,
    pub upper_bound: usize,
    pub lower_bound: usize,
    pub certified: bool,
    /// ord_t of ι_n of each generator.
    pub t_orders: Vec<usize>,
    /// S-rank of the formal power-series eigenspace.
    pub formal_rank: usize,
    /// S-rank of the Γ-eigenvectors in D_dif^{+,n}/(t^k).
    pub invariants_rank: usize,
    pub invariants_dim: usize,
    pub k_min: usize,
    pub level: u32,
    pub t_cap: usize,
    pub target: i64,
    /// Every ι_n-image is a Γ-eigenvector mod t^k.
    pub images_invariant: bool,
    /// ι_n-images of `span` are independent mod t^k.
    pub injective: bool,
    /// ι_{n+1}(x) = α^{-1}·ι_{n+1}(A)·ι_n(x), when level n+1 is admissible.
    pub propagation: Option<bool>,
}

impl<Q: Scalar> PeriodSolution<Q> {
    pub fn rank(&self) -> usize {
        self.lower_bound
    }

    pub fn q_dim(&self) -> usize {
        self.span.len()
    }
}

/// First τ-degree with a coefficient of valuation below `tol` (`k` if none).
pub fn order_at<Q: Scalar>(x: &DifElement<Q>, tol: i64) -> usize {
    let k = x.t_order_cap();
    (0..k).find(|&j| x.coeff(j).valuation().map_or(false, |v| v < tol)).unwrap_or(k)
}

pub(crate) fn small<Q: Ring>(x: &Q, tol: i64) -> bool {
    x.valuation().map_or(true, |v| v >= tol)
}

/// Rank with entries of valuation >= `tol` treated as zero.
pub fn rank_at<Q: Ring>(rows: &[Vec<Q>], tol: i64) -> usize {
    let mut rows: Vec<Vec<Q>> = rows.to_vec();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let piv = (rank..rows.len())
            .filter(|&i| !small(&rows[i][col], tol))
            .min_by_key(|&i| rows[i][col].valuation().unwrap_or(i64::MAX));
        let Some(pi) = piv else { continue };
        rows.swap(rank, pi);
        let inv = rows[rank][col].try_inv().expect("pivot is nonzero");
        for i in rank + 1..rows.len() {
            if small(&rows[i][col], tol) {
                continue;
            }
            let f = rows[i][col].clone() * inv.clone();
            for j in col..ncols {
                let t = f.clone() * rows[rank][j].clone();
                rows[i][j] = rows[i][j].clone() - t;
            }
        }
        rank += 1;
    }
    rank
}

fn dif_small<Q: Scalar>(v: &[DifElement<Q>], tol: i64) -> bool {
    v.iter().all(|x| x.coeffs().iter().all(|c| small(c, tol)))
}

fn dif_coords<Q: Scalar>(v: &[DifElement<Q>]) -> Vec<Q> {
    v.iter().flat_map(|x| x.coords()).collect()
}

/// w of a residual: its guarantee-aware minimum, capped by the scalar precision.
fn residual_w<Q: Scalar>(r: &[RobbaElement<Q>]) -> Option<W> {
    let mut acc: Option<W> = None;
    for x in r {
        acc = min_bound(acc, x.w_true());
        let sp = x.scalar_precision();
        if sp != padic_core::EXACT {
            acc = min_bound(acc, Some(W::from_integer(sp)));
        }
    }
    acc
}

fn level_check(ann: Annulus, p: u32, n: u32) -> Result<(), PeriodError> {
    let r = Annulus::level_radius(p, n);
    if n == 0 || !ann.contains(r) {
        return Err(PeriodError::LevelOutOfRange { n, r: r.to_string() });
    }
    Ok(())
}

/// Coordinate vector of power series from coefficient vectors.
fn to_vector<Q: Scalar>(d: &PhiGammaModule<Q>, v: &Coeffs<Q>, window: i64) -> Vec<RobbaElement<Q>> {
    let frame = d.frame();
    (0..d.rank())
        .map(|r| RobbaElement::from_series(d.like(), frame.ann, window, v.iter().map(|row| row[r].clone()).collect()))
        .collect()
}

/// Greedy S-generators: indices of basis vectors independent modulo z·K.
fn generators<Q: Scalar>(solver: &FormalSolver<Q>, basis: &[Coeffs<Q>], m: usize) -> Vec<usize> {
    let mut span: Vec<Vec<Q>> = if m > 1 { basis.iter().map(|b| flatten(&solver.times_z(b))).collect() } else { Vec::new() };
    let rank_of = |rows: &[Vec<Q>]| if rows.is_empty() { 0 } else { padic_core::linalg::rank(&Matrix::from_rows(rows.to_vec())) };
    let mut r0 = rank_of(&span);
    let mut out = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        span.push(flatten(b));
        let r = rank_of(&span);
        if r > r0 {
            r0 = r;
            out.push(i);
        } else {
            span.pop();
        }
    }
    out
}

/// Eigenvectors A·φ(x) = δ(p)·x, G·γ_0(x) = δ(χ(γ_0))·x, W·ω(x) = δ(χ(ω))·x,
/// checked at level n modulo t^k, at the default target.
pub fn solve_period<Q: Scalar>(d: &PhiGammaModule<Q>, delta: &Character<Q>, n: u32, k: usize) -> Result<PeriodSolution<Q>, PeriodError> {
    solve_period_at(d, delta, n, k, DEFAULT_TARGET)
}

pub fn solve_period_at<Q: Scalar>(
    d: &PhiGammaModule<Q>,
    delta: &Character<Q>,
    n: u32,
    k: usize,
    target: i64,
) -> Result<PeriodSolution<Q>, PeriodError> {
    if !d.is_power_series() {
        return Err(PeriodError::NotPowerSeries(d.pole_order()));
    }
    let p = d.prime();
    let frame = d.frame();
    level_check(frame.ann, p, n)?;
    min_slope(d).ok_or(PeriodError::SingularFrobenius)?;
    let k_min = slope_threshold(delta, d);
    if k < k_min {
        return Err(PeriodError::BelowThreshold { k, k_min });
    }
    let tol = target - SLACK;
    let m = d.like().order();
    let alpha = delta.p_value.clone();
    let eta0 = delta.eval_unit(d.chi_gamma0())?;
    let eta_w = delta.eval_unit(d.chi_omega())?;

    let top = frame.window.max(1) as usize;
    let solver = FormalSolver::new(d, &alpha, &eta0, &eta_w, k_min + 2, top)?;
    let heads = solver.kernel();
    let gens = generators(&solver, &heads, m);
    let ptab = phi_power_table(d.like().coeff(0), p, top + 1);

    // Extend, then certify against the full presentation.
    let mut span = Vec::with_capacity(heads.len());
    let mut floor: Option<W> = None;
    for h in &heads {
        let full = solver.extend(h, top, &ptab)?;
        let wide = to_vector(d, &full, frame.window * p as i64);
        let x = to_vector(d, &full, frame.window);
        let r_phi: Vec<RobbaElement<Q>> =
            d.apply_phi(&wide).into_iter().zip(&x).map(|(a, b)| a - b.scale(&alpha)).collect();
        let r_g: Vec<RobbaElement<Q>> = d.apply_gamma0(&x).into_iter().zip(&x).map(|(a, b)| a - b.scale(&eta0)).collect();
        let r_w: Vec<RobbaElement<Q>> =
            d.apply_omega(&x)?.into_iter().zip(&x).map(|(a, b)| a - b.scale(&eta_w)).collect();
        let f = min_bound(min_bound(residual_w(&r_phi), residual_w(&r_g)), residual_w(&r_w));
        floor = min_bound(floor, f);
        span.push(x);
    }
    if let Some(f) = floor {
        if f < W::from_integer(tol) {
            return Err(PeriodError::WindowTooSmall { window: frame.window, floor: f.to_string(), required: tol });
        }
    }

    // Upper bound from Γ-eigenvectors of the localization.
    let dm = d.dif_module(n, k)?;
    let inv = dm.gamma_invariants(delta)?;

    // ι_n-images: Γ-eigen, independent, and propagating to level n+1.
    let loc = Localizer::new(d.like().coeff(0), n, k);
    let mut images = Vec::with_capacity(span.len());
    for x in &span {
        let mut img = Vec::with_capacity(x.len());
        for e in x {
            img.push(loc.apply(e)?);
        }
        images.push(img);
    }
    let mut images_invariant = true;
    for img in &images {
        let g0: Vec<DifElement<Q>> = dm.apply_gamma0(img).into_iter().zip(img).map(|(a, b)| a - b.scale_base(&eta0)).collect();
        let gw: Vec<DifElement<Q>> = dm.apply_omega(img).into_iter().zip(img).map(|(a, b)| a - b.scale_base(&eta_w)).collect();
        images_invariant &= dif_small(&g0, tol) && dif_small(&gw, tol);
    }
    let coords: Vec<Vec<Q>> = images.iter().map(|v| dif_coords(v)).collect();
    let injective = rank_at(&coords, tol) == span.len();

    let next = n + 1;
    let propagation = if frame.ann.contains(Annulus::level_radius(p, next)) {
        let up = Localizer::new(d.like().coeff(0), next, k);
        let a_up = Matrix::from_rows(
            (0..d.rank())
                .map(|i| (0..d.rank()).map(|j| up.apply(d.phi_matrix().get(i, j))).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
        );
        let ainv = alpha.try_inv().expect("δ(p) is a unit");
        let mut ok = true;
        for (x, img) in span.iter().zip(&images) {
            let lifted: Vec<DifElement<Q>> = img.iter().map(|e| e.to_next_level()).collect();
            let rhs: Vec<DifElement<Q>> = a_up.apply(&lifted).into_iter().map(|e| e.scale_base(&ainv)).collect();
            let mut diff = Vec::with_capacity(x.len());
            for (e, r) in x.iter().zip(rhs) {
                diff.push(up.apply(e)? - r);
            }
            ok &= dif_small(&diff, tol);
        }
        Some(ok)
    } else {
        None
    };

    let vectors: Vec<Vec<RobbaElement<Q>>> = gens.iter().map(|&i| span[i].clone()).collect();
    let t_orders = gens
        .iter()
        .map(|&i| images[i].iter().map(|e| order_at(e, tol)).min().unwrap_or(k))
        .collect();
    let formal_rank = gens.len();
    let upper_bound = formal_rank.min(inv.rank);
    let lower_bound = if images_invariant && injective && formal_rank <= inv.rank { formal_rank } else { 0 };
    let certified = lower_bound == upper_bound && propagation != Some(false);
    Ok(PeriodSolution {
        vectors,
        span,
        residual_floor: floor,
        upper_bound,
        lower_bound,
        certified,
        t_orders,
        formal_rank,
        invariants_rank: inv.rank,
        invariants_dim: inv.q_dim(),
        k_min,
        level: n,
        t_cap: k,
        target,
        images_invariant,
        injective,
        propagation,
    })
}

/// Residual floor of the three δ-eigenvector equations for a given vector.
pub fn eigen_residual<Q: Scalar>(d: &PhiGammaModule<Q>, x: &[RobbaElement<Q>], delta: &Character<Q>) -> Result<Option<W>, PeriodError> {
    let alpha = &delta.p_value;
    let eta0 = delta.eval_unit(d.chi_gamma0())?;
    let eta_w = delta.eval_unit(d.chi_omega())?;
    // φ is applied with the window widened by p, as in the solver.
    let wide: Vec<RobbaElement<Q>> = x.iter().map(|e| e.raise_window(e.window() * d.prime() as i64)).collect();
    let r_phi: Vec<RobbaElement<Q>> = d.apply_phi(&wide).into_iter().zip(x).map(|(a, b)| a - b.scale(alpha)).collect();
    let r_g: Vec<RobbaElement<Q>> = d.apply_gamma0(x).into_iter().zip(x).map(|(a, b)| a - b.scale(&eta0)).collect();
    let r_w: Vec<RobbaElement<Q>> = d.apply_omega(x)?.into_iter().zip(x).map(|(a, b)| a - b.scale(&eta_w)).collect();
    Ok(min_bound(min_bound(residual_w(&r_phi), residual_w(&r_g)), residual_w(&r_w)))
}

/// ord_t of ι_n(x) at one admissible level; saturated iff the order is 0.
pub fn saturation_test<Q: Scalar>(d: &PhiGammaModule<Q>, x: &[RobbaElement<Q>], n: u32, k: usize) -> Result<(bool, usize), PeriodError> {
    level_check(d.frame().ann, d.prime(), n)?;
    let img = d.localize_vector(x, n, k)?;
    let order = img.iter().map(|e| order_at(e, DEFAULT_TARGET - SLACK)).min().unwrap_or(k);
    Ok((order == 0, order))
}

/// The S-span of solutions as coordinate vectors of base elements (for tests
/// and reports): the coefficient of T^0 of each component.
pub fn constant_terms<Q: Scalar>(x: &[RobbaElement<Q>]) -> Vec<Trunc<Q>> {
    x.iter().map(|e| e.coeff(0)).collect()
}

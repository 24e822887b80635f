//! First stage: ex-ante payoffs, best responses and equilibrium platforms.
//!
//! With `m` uniform on `[0, 1]` and a fixed second-stage payoff inside each
//! band of the [`RegionPartition`], the ex-ante payoff is a finite sum of
//! band lengths times band payoffs. Every first-stage quantity is computed
//! from that one integration routine; the closed piecewise forms are kept
//! alongside as cross-checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    classify, outer_weak_favorite_threshold, unclamped_secured_ends, weak_favorite_threshold, Candidate, GameParams,
    Median, PlatformPair, SubgameStatus,
};
use crate::subgame::status_payoffs;

/// Band endpoints closer than this are merged; such bands carry no measurable mass.
pub const BOUNDARY_MERGE_TOL: f64 = 1e-13;

/// Organizational-cost threshold `1 / (1 + 4 sqrt(a (1 + a)))` separating
/// existence of a divergent equilibrium from the centrist race.
pub fn psi(a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::invalid(format!("electoral cost must be positive and finite, got {a}")));
    }
    Ok(1.0 / (1.0 + 4.0 * (a * (1.0 + a)).sqrt()))
}

/// Smallest `phi` above which `responder`'s ex-ante payoff falls when it
/// approaches the opponent past its secured-interval junction.
///
/// With equal costs this is [`psi`]. With unequal costs the slope of the
/// near piece is `2 phi b / (b^2 - 1) - (1 - phi) / (a_r + b)` per unit of
/// distance, `b` being the opponent's alpha and `a_r` the responder's, so the
/// threshold is `(b^2 - 1) / (b^2 - 1 + 2 (a_r + b))`.
pub fn existence_threshold(responder: Candidate, params: &GameParams) -> f64 {
    if params.is_symmetric() {
        return psi(params.a(responder)).expect("validated electoral cost");
    }
    let own = params.alpha(responder);
    let opp = params.alpha(responder.other());
    let b2 = opp * opp - 1.0;
    b2 / (b2 + 2.0 * (own + opp))
}

/// Larger of the two [`existence_threshold`]s. With equal costs this is the
/// exact existence threshold; with unequal costs it is only necessary, since
/// the more flexible candidate may also gain by moving next to its opponent.
pub fn equilibrium_threshold(params: &GameParams) -> f64 {
    existence_threshold(Candidate::One, params).max(existence_threshold(Candidate::Two, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub status: SubgameStatus,
    pub payoffs: [f64; 2],
}

impl Region {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// Sorted, disjoint bands of `m` covering `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPartition {
    pub regions: Vec<Region>,
}

impl RegionPartition {
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.regions.iter().map(|r| r.lo).collect();
        if let Some(last) = self.regions.last() {
            out.push(last.hi);
        }
        out
    }

    pub fn statuses(&self) -> Vec<SubgameStatus> {
        self.regions.iter().map(|r| r.status).collect()
    }

    /// Total length of the bands whose status satisfies `pred`.
    pub fn measure(&self, pred: impl Fn(&SubgameStatus) -> bool) -> f64 {
        self.regions.iter().filter(|r| pred(&r.status)).map(Region::len).sum()
    }

    /// Probability that the election is not secured once `m` is revealed.
    pub fn open_probability(&self) -> f64 {
        self.measure(|s| matches!(s, SubgameStatus::Open { .. } | SubgameStatus::WeakFavorite { .. }))
    }

    pub fn expected_payoffs(&self) -> [f64; 2] {
        self.regions.iter().fold([0.0; 2], |acc, r| [acc[0] + r.len() * r.payoffs[0], acc[1] + r.len() * r.payoffs[1]])
    }

    pub fn mirrored(&self) -> Self {
        let regions = self.regions.iter().rev().map(|r| Region { lo: 1.0 - r.hi, hi: 1.0 - r.lo, ..*r }).collect();
        RegionPartition { regions }
    }
}

fn interior_status(pair: &PlatformPair, lo: f64, hi: f64, params: &GameParams) -> Result<SubgameStatus> {
    // The midpoint can only be a knife edge through rounding; fall back to other interior points.
    for frac in [0.5, 1.0 / 3.0, 2.0 / 3.0, 0.25, 0.75] {
        let m = Median::new(lo + (hi - lo) * frac)?;
        let status = classify(pair, m, params);
        if status != SubgameStatus::KnifeEdge {
            return Ok(status);
        }
    }
    Err(Error::invalid(format!("band ({lo}, {hi}) has no classifiable interior point")))
}

/// Medians at which some classifying inequality can hold with equality:
/// secured-interval ends, the midpoint and the tie roots of the adjusted
/// utilities. Unsorted and not clamped, so points outside `[0, 1]` are kept.
pub fn critical_medians(pair: &PlatformPair, params: &GameParams) -> Result<Vec<f64>> {
    if pair.is_identical() {
        return Err(Error::invalid("identical platforms have no critical medians"));
    }
    let (lo1, hi1) = unclamped_secured_ends(Candidate::One, pair, params)?;
    let (lo2, hi2) = unclamped_secured_ends(Candidate::Two, pair, params)?;
    let mid = 0.5 * (pair.x(Candidate::One) + pair.x(Candidate::Two));
    let tilde = weak_favorite_threshold(pair, params)?;
    let outer = outer_weak_favorite_threshold(pair, params)?.unwrap_or(tilde);
    Ok(vec![lo1, hi1, lo2, hi2, mid, tilde, outer])
}

pub fn region_partition(pair: &PlatformPair, params: &GameParams) -> Result<RegionPartition> {
    if pair.is_identical() {
        return Err(Error::invalid("identical platforms have no region partition"));
    }
    let mut points: Vec<f64> = critical_medians(pair, params)?.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
    points.extend([0.0, 1.0]);
    points.sort_by(f64::total_cmp);

    let mut cuts: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match cuts.last() {
            Some(&prev) if p - prev <= BOUNDARY_MERGE_TOL => {}
            _ => cuts.push(p),
        }
    }
    // the final cut must be exactly 1
    if let Some(last) = cuts.last_mut() {
        *last = 1.0;
    }

    let mut regions: Vec<Region> = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let status = interior_status(pair, lo, hi, params)?;
        let payoffs = status_payoffs(status, params.phi()).expect("interior status is never a knife edge");
        match regions.last_mut() {
            Some(prev) if prev.status == status => prev.hi = hi,
            _ => regions.push(Region { lo, hi, status, payoffs }),
        }
    }
    Ok(RegionPartition { regions })
}

/// Expected payoffs before `m` is drawn, both candidates playing the
/// second-stage equilibrium.
pub fn exante_payoff(pair: &PlatformPair, params: &GameParams) -> [f64; 2] {
    if pair.is_identical() {
        let v = 0.5 - params.phi();
        return [v, v];
    }
    region_partition(pair, params).expect("distinct in-range platforms always partition").expected_payoffs()
}

/// Candidate 1's ex-ante payoff from the piecewise-linear closed form
/// (equal costs, candidate 1 on the left).
pub fn closed_form_g1(pair: &PlatformPair, params: &GameParams) -> Result<f64> {
    if !params.is_symmetric() {
        return Err(Error::Unsupported("closed form requires equal electoral costs; use exante_payoff".into()));
    }
    let (x1, x2) = (pair.x(Candidate::One), pair.x(Candidate::Two));
    if x1 >= x2 {
        return Err(Error::invalid("closed form requires x1 < x2"));
    }
    let al = params.alpha(Candidate::One);
    let phi = params.phi();
    let half = (1.0 - phi) / 2.0;
    if x1 <= x2 / al {
        Ok(x1 * (half + phi * al / (al + 1.0)) + x2 * (half + phi / (al + 1.0)))
    } else {
        let k = 2.0 * phi * al / (al * al - 1.0);
        Ok(x1 * (half - k) + x2 * (half + k))
    }
}

fn pair_with(responder: Candidate, own: f64, opponent: f64) -> PlatformPair {
    let pair = match responder {
        Candidate::One => PlatformPair::new(own, opponent),
        Candidate::Two => PlatformPair::new(opponent, own),
    };
    pair.expect("responses stay inside [0, 1]")
}

/// Payoff gaps below this are treated as ties between an attained value and
/// a supremum approached next to the opponent.
pub const SUPREMUM_TIE_TOL: f64 = 1e-12;
/// Kinks this close to the opponent's platform are rounding images of it.
pub const OPPONENT_MERGE_TOL: f64 = 1e-9;

/// Every band endpoint of the partition as an affine function `p + q x` of
/// the responder's platform `x`, the opponent sitting at `xo`.
fn breakpoint_lines(xo: f64, own_alpha: f64, opp_alpha: f64) -> Vec<(f64, f64)> {
    let (g, b) = (own_alpha, opp_alpha);
    let mut lines = vec![
        // responder's secured interval: far and near ends
        (-xo / (b - 1.0), b / (b - 1.0)),
        (xo / (b + 1.0), b / (b + 1.0)),
        // opponent's secured interval: near and far ends
        (g * xo / (g + 1.0), 1.0 / (g + 1.0)),
        (g * xo / (g - 1.0), -1.0 / (g - 1.0)),
        // midpoint and inner adjustment tie
        (0.5 * xo, 0.5),
        (g * xo / (g + b), b / (g + b)),
    ];
    if g != b {
        // outer adjustment tie
        lines.push((g * xo / (g - b), -b / (g - b)));
    }
    lines
}

/// Platforms at which the responder's payoff may change slope: a band
/// endpoint reaching 0 or 1, or two endpoints crossing.
fn kink_points(xo: f64, own_alpha: f64, opp_alpha: f64) -> Vec<f64> {
    let lines = breakpoint_lines(xo, own_alpha, opp_alpha);
    let mut out = Vec::new();
    for (i, &(p, q)) in lines.iter().enumerate() {
        out.push(-p / q);
        out.push((1.0 - p) / q);
        for &(pl, ql) in &lines[i + 1..] {
            if q != ql {
                out.push((pl - p) / (q - ql));
            }
        }
    }
    out.retain(|x| x.is_finite() && (0.0..=1.0).contains(x));
    out
}

/// Highest ex-ante payoff available to a responder against a fixed opponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseSupremum {
    /// Best attainable platform and its payoff.
    pub platform: f64,
    pub payoff: f64,
    /// Payoff approached as the responder closes in on the opponent from
    /// the left and from the right, without being attained there.
    pub limit_left: Option<f64>,
    pub limit_right: Option<f64>,
}

impl ResponseSupremum {
    pub fn limit(&self) -> Option<f64> {
        match (self.limit_left, self.limit_right) {
            (Some(l), Some(r)) => Some(l.max(r)),
            (l, r) => l.or(r),
        }
    }
}

/// Exact supremum of the responder's payoff over its own platform.
///
/// The payoff is piecewise linear in the responder's platform, so it is
/// maximised at a kink, at an end of the policy space, at the opponent's
/// platform itself, or approached next to the opponent. The limit on each
/// side is extrapolated from the last linear piece.
pub fn response_supremum(
    opponent_platform: f64,
    responder: Candidate,
    params: &GameParams,
) -> Result<ResponseSupremum> {
    let xo = opponent_platform;
    if !(0.0..=1.0).contains(&xo) {
        return Err(Error::invalid(format!("opponent platform must lie in [0, 1], got {xo}")));
    }
    let payoff = |own: f64| exante_payoff(&pair_with(responder, own, xo), params)[responder.index()];
    let kinks = kink_points(xo, params.alpha(responder), params.alpha(responder.other()));

    let mut candidates: Vec<f64> = kinks.into_iter().filter(|&x| (x - xo).abs() > OPPONENT_MERGE_TOL).collect();
    candidates.extend([0.0, 1.0, xo]);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let limit = |from: f64| {
        let u = from + 0.5 * (xo - from);
        let v = from + 0.75 * (xo - from);
        let (gu, gv) = (payoff(u), payoff(v));
        gv + (gv - gu) * (xo - v) / (v - u)
    };
    let limit_left = (xo > 0.0).then(|| limit(candidates.iter().copied().filter(|&x| x < xo).fold(0.0, f64::max)));
    let limit_right = (xo < 1.0).then(|| limit(candidates.iter().copied().filter(|&x| x > xo).fold(1.0, f64::min)));

    // Ties go left for candidate 1 and right for candidate 2.
    let prefer_left = responder == Candidate::One;
    let (platform, best) = candidates
        .into_iter()
        .map(|y| (y, payoff(y)))
        .reduce(
            |best, cand| {
                if cand.1 > best.1 || (cand.1 == best.1 && (cand.0 < best.0) == prefer_left) {
                    cand
                } else {
                    best
                }
            },
        )
        .expect("candidate set always holds the end points");
    Ok(ResponseSupremum { platform, payoff: best, limit_left, limit_right })
}

/// Best ex-ante platform of `responder` against a fixed opponent platform.
///
/// Fails with [`Error::NoBestResponse`] when the supremum is only approached
/// next to the opponent, and with [`Error::BoundaryUnspecified`] when that
/// limit ties the best attainable payoff. Exact ties between attainable
/// platforms go left for candidate 1 and right for candidate 2.
pub fn best_response(opponent_platform: f64, responder: Candidate, params: &GameParams) -> Result<f64> {
    let sup = response_supremum(opponent_platform, responder, params)?;
    if let Some(limit) = sup.limit() {
        if limit > sup.payoff + SUPREMUM_TIE_TOL {
            return Err(Error::NoBestResponse(format!(
                "candidate {responder}'s payoff approaches {limit} next to the opponent at {opponent_platform} \
                 but only {} is attainable",
                sup.payoff
            )));
        }
        if limit >= sup.payoff - SUPREMUM_TIE_TOL {
            return Err(Error::BoundaryUnspecified(format!(
                "candidate {responder}'s payoff limit {limit} next to the opponent ties the best attainable {}",
                sup.payoff
            )));
        }
    }
    Ok(sup.platform)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spne {
    pub positions: [f64; 2],
    pub payoffs: [f64; 2],
    /// Candidate on the left. The mirror image is an equilibrium as well.
    pub left: Candidate,
}

impl Spne {
    pub fn pair(&self) -> PlatformPair {
        PlatformPair::new(self.positions[0], self.positions[1]).expect("equilibrium platforms lie in [0, 1]")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FirstStageSolution {
    Spne(Spne),
    /// `(center - e, center + e)` is a `loss_coefficient * e`-equilibrium.
    EpsilonEquilibrium {
        center: f64,
        loss_coefficient: f64,
    },
    NoEquilibrium {
        reason: String,
    },
}

/// Worst-case gain per unit `e` from deviating off `(1/2 - e, 1/2 + e)`
/// when `phi` is below the threshold (equal costs).
///
/// Candidate 1's payoff is `(1 - phi)/2 + e * 4 alpha phi / (alpha^2 - 1)`,
/// while moving up to the opponent approaches `(1/2 + e)(1 - phi)`.
pub fn epsilon_loss_coefficient(params: &GameParams) -> f64 {
    let al = params.alpha(Candidate::One);
    let phi = params.phi();
    (1.0 - phi) - 4.0 * al * phi / (al * al - 1.0)
}

/// Platforms `(1/2 - e, 1/2 + e)` of the centrist near-equilibrium.
pub fn epsilon_profile(epsilon: f64) -> Result<PlatformPair> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/2], got {epsilon}")));
    }
    PlatformPair::new(0.5 - epsilon, 0.5 + epsilon)
}

/// Equilibrium platforms of the candidate on the left and on the right.
fn divergent_positions(alpha_left: f64, alpha_right: f64) -> (f64, f64) {
    let denom = alpha_left * alpha_right - 1.0;
    let left = (alpha_left - 1.0) / denom;
    (left, alpha_right * left)
}

/// Tolerance when certifying equilibrium platforms as mutual best responses.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Solve the first stage.
///
/// With equal costs, `phi` above [`psi`] gives the divergent equilibrium and
/// `phi` below it the centrist epsilon-equilibrium. With unequal costs the
/// divergent profile is returned only when each platform is an exact best
/// response to the other; otherwise there is no equilibrium.
pub fn solve_first_stage(params: &GameParams) -> Result<FirstStageSolution> {
    let phi = params.phi();
    if params.is_symmetric() {
        let threshold = psi(params.a(Candidate::One))?;
        if phi == threshold {
            return Err(Error::BoundaryUnspecified(format!("phi = {phi} equals the existence threshold")));
        }
        if phi < threshold {
            return Ok(FirstStageSolution::EpsilonEquilibrium {
                center: 0.5,
                loss_coefficient: epsilon_loss_coefficient(params),
            });
        }
    }

    // The more flexible candidate takes the left seat; ties keep candidate 1 left.
    let left = if params.a(Candidate::One) <= params.a(Candidate::Two) { Candidate::One } else { Candidate::Two };
    let right = left.other();
    let (xl, xr) = divergent_positions(params.alpha(left), params.alpha(right));
    let mut positions = [0.0; 2];
    positions[left.index()] = xl;
    positions[right.index()] = xr;
    let pair = PlatformPair::new(positions[0], positions[1])?;

    for c in Candidate::BOTH {
        let own = positions[c.index()];
        let opp = positions[c.other().index()];
        match best_response(opp, c, params) {
            Ok(y) if (y - own).abs() <= FIXED_POINT_TOL => {}
            Ok(y) => {
                let sup = response_supremum(opp, c, params)?;
                return Ok(FirstStageSolution::NoEquilibrium {
                    reason: format!(
                        "candidate {c} gains by moving from {own} to {y} (payoff {} against {})",
                        sup.payoff,
                        exante_payoff(&pair, params)[c.index()]
                    ),
                });
            }
            Err(Error::NoBestResponse(msg)) => {
                return Ok(FirstStageSolution::NoEquilibrium { reason: msg });
            }
            Err(e) => return Err(e),
        }
    }
    let payoffs = exante_payoff(&pair, params);
    Ok(FirstStageSolution::Spne(Spne { positions, payoffs, left }))
}

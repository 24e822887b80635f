//! Domain types of the electoral game and the classification of
//! second-stage configurations.
//!
//! Voters evaluate candidate `i` with ex-ante platform `x` and ex-post
//! platform `y` through `-(t - y)^2 - a_i (y - x)^2`. Everything here is a
//! pure function of its inputs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable candidate label. Never reordered internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Candidate {
    One,
    Two,
}

impl Candidate {
    pub const BOTH: [Candidate; 2] = [Candidate::One, Candidate::Two];

    pub fn other(self) -> Candidate {
        match self {
            Candidate::One => Candidate::Two,
            Candidate::Two => Candidate::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Candidate::One => 0,
            Candidate::Two => 1,
        }
    }

    pub fn id(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl From<Candidate> for u8 {
    fn from(c: Candidate) -> u8 {
        c.id()
    }
}

impl TryFrom<u8> for Candidate {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Candidate::One),
            2 => Ok(Candidate::Two),
            other => Err(Error::invalid(format!("candidate id must be 1 or 2, got {other}"))),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// `sqrt((1 + a) / a)`, the quantity every closed form is written in.
pub fn alpha(a: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::invalid(format!("electoral cost must be positive and finite, got {a}")));
    }
    Ok(((1.0 + a) / a).sqrt())
}

/// Electoral costs `a1`, `a2` and the organizational cost `phi`.
///
/// `alpha` is derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    a: [f64; 2],
    alpha: [f64; 2],
    phi: f64,
}

impl GameParams {
    pub fn new(a1: f64, a2: f64, phi: f64) -> Result<Self> {
        let alpha = [alpha(a1)?, alpha(a2)?];
        if alpha.iter().any(|&al| al <= 1.0) {
            return Err(Error::invalid(format!("electoral costs ({a1}, {a2}) too large: alpha rounds to 1")));
        }
        if !phi.is_finite() || phi <= 0.0 || phi >= 0.5 {
            return Err(Error::invalid(format!("organizational cost must lie in (0, 1/2), got {phi}")));
        }
        Ok(GameParams { a: [a1, a2], alpha, phi })
    }

    pub fn symmetric(a: f64, phi: f64) -> Result<Self> {
        Self::new(a, a, phi)
    }

    pub fn a(&self, c: Candidate) -> f64 {
        self.a[c.index()]
    }

    pub fn alpha(&self, c: Candidate) -> f64 {
        self.alpha[c.index()]
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_symmetric(&self) -> bool {
        self.a[0] == self.a[1]
    }

    /// Same game with the candidate labels exchanged.
    pub fn swapped(&self) -> Self {
        GameParams { a: [self.a[1], self.a[0]], alpha: [self.alpha[1], self.alpha[0]], phi: self.phi }
    }
}

fn check_coordinate(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

/// Ex-ante platforms. No ordering is assumed between the two coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlatformPair {
    x: [f64; 2],
}

impl PlatformPair {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        check_coordinate("x1", x1)?;
        check_coordinate("x2", x2)?;
        Ok(PlatformPair { x: [x1, x2] })
    }

    pub fn x(&self, c: Candidate) -> f64 {
        self.x[c.index()]
    }

    pub fn is_identical(&self) -> bool {
        self.x[0] == self.x[1]
    }

    /// Candidate sitting on the left, `None` for identical platforms.
    pub fn left(&self) -> Option<Candidate> {
        if self.x[0] < self.x[1] {
            Some(Candidate::One)
        } else if self.x[1] < self.x[0] {
            Some(Candidate::Two)
        } else {
            None
        }
    }

    /// Reflection `x -> 1 - x` of the policy space.
    pub fn mirrored(&self) -> Self {
        PlatformPair { x: [1.0 - self.x[0], 1.0 - self.x[1]] }
    }

    pub fn swapped(&self) -> Self {
        PlatformPair { x: [self.x[1], self.x[0]] }
    }
}

/// Realized location of the median voter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Median(f64);

impl Median {
    pub fn new(m: f64) -> Result<Self> {
        check_coordinate("m", m)?;
        Ok(Median(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn mirrored(self) -> Self {
        Median(1.0 - self.0)
    }
}

/// Second-stage situation once `m` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubgameStatus {
    Identical,
    /// The favorite wins without moving, whatever the challenger does.
    Secured {
        favorite: Candidate,
    },
    Open {
        favorite: Candidate,
    },
    /// The favorite loses once both candidates adjust.
    WeakFavorite {
        weak_favorite: Candidate,
        strong_challenger: Candidate,
    },
    /// `m` is equidistant, or a classifying inequality holds with equality.
    KnifeEdge,
}

impl SubgameStatus {
    pub fn favorite(&self) -> Option<Candidate> {
        match *self {
            SubgameStatus::Secured { favorite } | SubgameStatus::Open { favorite } => Some(favorite),
            SubgameStatus::WeakFavorite { weak_favorite, .. } => Some(weak_favorite),
            SubgameStatus::Identical | SubgameStatus::KnifeEdge => None,
        }
    }

    /// Status of the same configuration with labels exchanged.
    pub fn swapped(&self) -> Self {
        match *self {
            SubgameStatus::Secured { favorite } => SubgameStatus::Secured { favorite: favorite.other() },
            SubgameStatus::Open { favorite } => SubgameStatus::Open { favorite: favorite.other() },
            SubgameStatus::WeakFavorite { weak_favorite, strong_challenger } => SubgameStatus::WeakFavorite {
                weak_favorite: weak_favorite.other(),
                strong_challenger: strong_challenger.other(),
            },
            other => other,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SubgameStatus::Identical => "identical".into(),
            SubgameStatus::Secured { favorite } => format!("secured({favorite})"),
            SubgameStatus::Open { favorite } => format!("open({favorite})"),
            SubgameStatus::WeakFavorite { weak_favorite, strong_challenger } => {
                format!("weak_favorite({weak_favorite},{strong_challenger})")
            }
            SubgameStatus::KnifeEdge => "knife_edge".into(),
        }
    }
}

impl fmt::Display for SubgameStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Values of `m` for which `candidate` has secured the election.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecuredInterval {
    pub candidate: Candidate,
    pub lo: f64,
    pub hi: f64,
}

impl SecuredInterval {
    /// Open-interval membership.
    pub fn contains(&self, m: f64) -> bool {
        self.lo < m && m < self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

pub fn voter_utility(t: f64, x: f64, y: f64, a: f64) -> f64 {
    -(t - y).powi(2) - a * (y - x).powi(2)
}

/// Ex-post platform maximizing the median voter's utility: a weighted
/// average of `m` and `x` with weights `1` and `a`.
pub fn optimal_adjustment(m: f64, x: f64, a: f64) -> f64 {
    (m + a * x) / (1.0 + a)
}

pub fn secured_interval(candidate: Candidate, pair: &PlatformPair, params: &GameParams) -> Result<SecuredInterval> {
    let (lo, hi) = unclamped_secured_ends(candidate, pair, params)?;
    Ok(SecuredInterval { candidate, lo: lo.clamp(0.0, 1.0), hi: hi.clamp(0.0, 1.0) })
}

/// Ends of the secured interval before clamping to the support. The far end
/// may lie outside `[0, 1]`.
pub fn unclamped_secured_ends(candidate: Candidate, pair: &PlatformPair, params: &GameParams) -> Result<(f64, f64)> {
    if pair.is_identical() {
        return Err(Error::invalid("identical platforms have no secured interval"));
    }
    let own = pair.x(candidate);
    let opp = pair.x(candidate.other());
    // Only the opponent's flexibility matters: securing means winning without moving.
    let beta = params.alpha(candidate.other());
    let far = (beta * own - opp) / (beta - 1.0);
    let near = (beta * own + opp) / (beta + 1.0);
    Ok(if own < opp { (far, near) } else { (near, far) })
}

/// The `m` at which both candidates' best adjustments tie for the median voter.
pub fn weak_favorite_threshold(pair: &PlatformPair, params: &GameParams) -> Result<f64> {
    if pair.is_identical() {
        return Err(Error::invalid("identical platforms have no weak-favorite threshold"));
    }
    let (a1, a2) = (params.alpha(Candidate::One), params.alpha(Candidate::Two));
    let (x1, x2) = (pair.x(Candidate::One), pair.x(Candidate::Two));
    Ok((a1 * x2 + a2 * x1) / (a1 + a2))
}

/// The other tie of the best adjustments, lying beyond the less flexible
/// candidate's platform. `None` with equal costs. Adjusted utilities are
/// `-(m - x)^2 / alpha^2`, so ties solve `|m - x1| / alpha1 = |m - x2| / alpha2`.
pub fn outer_weak_favorite_threshold(pair: &PlatformPair, params: &GameParams) -> Result<Option<f64>> {
    if pair.is_identical() {
        return Err(Error::invalid("identical platforms have no weak-favorite threshold"));
    }
    let (a1, a2) = (params.alpha(Candidate::One), params.alpha(Candidate::Two));
    if a1 == a2 {
        return Ok(None);
    }
    let (x1, x2) = (pair.x(Candidate::One), pair.x(Candidate::Two));
    Ok(Some((a1 * x2 - a2 * x1) / (a1 - a2)))
}

/// Closer ex-ante platform to `m`, `None` when equidistant.
pub fn favorite(pair: &PlatformPair, m: Median) -> Option<Candidate> {
    let d1 = (pair.x(Candidate::One) - m.value()).abs();
    let d2 = (pair.x(Candidate::Two) - m.value()).abs();
    if d1 < d2 {
        Some(Candidate::One)
    } else if d2 < d1 {
        Some(Candidate::Two)
    } else {
        None
    }
}

/// Median voter's utility from candidate `c` staying put.
pub(crate) fn stay_utility(c: Candidate, pair: &PlatformPair, m: f64, params: &GameParams) -> f64 {
    let x = pair.x(c);
    voter_utility(m, x, x, params.a(c))
}

/// Median voter's utility from candidate `c` moving to its optimal adjustment.
pub(crate) fn adjusted_utility(c: Candidate, pair: &PlatformPair, m: f64, params: &GameParams) -> f64 {
    let x = pair.x(c);
    let a = params.a(c);
    voter_utility(m, x, optimal_adjustment(m, x, a), a)
}

/// Classify the second stage. Comparisons are exact: any equality yields
/// [`SubgameStatus::KnifeEdge`].
pub fn classify(pair: &PlatformPair, m: Median, params: &GameParams) -> SubgameStatus {
    if pair.is_identical() {
        return SubgameStatus::Identical;
    }
    let Some(fav) = favorite(pair, m) else {
        return SubgameStatus::KnifeEdge;
    };
    let ch = fav.other();
    let m = m.value();

    let fav_stay = stay_utility(fav, pair, m, params);
    let ch_adjust = adjusted_utility(ch, pair, m, params);
    if fav_stay > ch_adjust {
        return SubgameStatus::Secured { favorite: fav };
    }
    if fav_stay == ch_adjust {
        return SubgameStatus::KnifeEdge;
    }

    let fav_adjust = adjusted_utility(fav, pair, m, params);
    if ch_adjust > fav_adjust {
        SubgameStatus::WeakFavorite { weak_favorite: fav, strong_challenger: ch }
    } else if ch_adjust == fav_adjust {
        SubgameStatus::KnifeEdge
    } else {
        SubgameStatus::Open { favorite: fav }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn sym(a: f64, phi: f64) -> GameParams {
        GameParams::symmetric(a, phi).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < EPS
    }

    #[test]
    fn alpha_hand_values() {
        assert!(close(alpha(1.0 / 3.0).unwrap(), 2.0));
        assert!(close(alpha(1.0 / 8.0).unwrap(), 3.0));
    }

    #[test]
    fn alpha_decreases_towards_one() {
        let grid: Vec<f64> = (0..60).map(|k| 10f64.powf(-2.0 + k as f64 * 0.1)).collect();
        let values: Vec<f64> = grid.iter().map(|&a| alpha(a).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values.iter().all(|&v| v > 1.0));
        assert!(alpha(1e6).unwrap() - 1.0 < 1e-6);
    }

    #[test]
    fn alpha_rejects_bad_input() {
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(alpha(a), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(1.0, 1.0, 0.0).is_err());
        assert!(GameParams::new(1.0, 1.0, 0.5).is_err());
        assert!(GameParams::new(1.0, -1.0, 0.3).is_err());
        assert!(GameParams::new(1e300, 1.0, 0.3).is_err());
        let p = GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap();
        assert!(close(p.alpha(Candidate::One), 3.0));
        assert!(!p.is_symmetric());
        assert_eq!(p.swapped().a(Candidate::One), 1.0 / 3.0);
    }

    #[test]
    fn platforms_are_range_checked() {
        assert!(PlatformPair::new(-0.1, 0.5).is_err());
        assert!(PlatformPair::new(0.5, 1.01).is_err());
        assert!(PlatformPair::new(0.5, f64::NAN).is_err());
        assert!(Median::new(1.5).is_err());
        assert_eq!(PlatformPair::new(0.7, 0.2).unwrap().left(), Some(Candidate::Two));
        assert_eq!(PlatformPair::new(0.5, 0.5).unwrap().left(), None);
    }

    #[test]
    fn voter_utility_examples() {
        assert!(close(voter_utility(0.5, 0.4, 0.4, 7.0), -0.01));
        assert_eq!(voter_utility(0.3, 0.3, 0.3, 2.0), 0.0);
        assert!(close(voter_utility(0.5, 0.2, 0.3, 1.0), -0.05));
    }

    #[test]
    fn optimal_adjustment_examples() {
        assert!(close(optimal_adjustment(0.4, 0.4, 2.0), 0.4));
        assert!(close(optimal_adjustment(0.5, 1.0 / 3.0, 1.0 / 3.0), 11.0 / 24.0));
        let mut prev = 0.9;
        for k in 0..40 {
            let a = 10f64.powf(-1.0 + 0.2 * k as f64);
            let y = optimal_adjustment(0.9, 0.2, a);
            assert!(y < prev && y > 0.2);
            prev = y;
        }
        assert!(optimal_adjustment(0.9, 0.2, 1e9) - 0.2 < 1e-8);
    }

    #[test]
    fn secured_interval_symmetric_fixture() {
        let pair = PlatformPair::new(1.0 / 3.0, 2.0 / 3.0).unwrap();
        let p = sym(1.0 / 3.0, 0.3);
        let s1 = secured_interval(Candidate::One, &pair, &p).unwrap();
        let s2 = secured_interval(Candidate::Two, &pair, &p).unwrap();
        assert!(close(s1.lo, 0.0) && close(s1.hi, 4.0 / 9.0), "{s1:?}");
        assert!(close(s2.lo, 5.0 / 9.0) && close(s2.hi, 1.0), "{s2:?}");
    }

    #[test]
    fn secured_interval_asymmetric_fixture() {
        let pair = PlatformPair::new(0.4, 0.8).unwrap();
        let p = GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap();
        let s1 = secured_interval(Candidate::One, &pair, &p).unwrap();
        let s2 = secured_interval(Candidate::Two, &pair, &p).unwrap();
        assert!(close(s1.lo, 0.0) && close(s1.hi, 8.0 / 15.0), "{s1:?}");
        assert!(close(s2.lo, 0.7) && close(s2.hi, 1.0), "{s2:?}");
    }

    #[test]
    fn secured_interval_depends_on_opponent_only() {
        let pair = PlatformPair::new(0.3, 0.6).unwrap();
        let base = secured_interval(Candidate::One, &pair, &GameParams::new(0.2, 1.0, 0.3).unwrap()).unwrap();
        let other = secured_interval(Candidate::One, &pair, &GameParams::new(5.0, 1.0, 0.3).unwrap()).unwrap();
        assert_eq!(base, other);
    }

    #[test]
    fn secured_interval_rejects_identical() {
        let pair = PlatformPair::new(0.5, 0.5).unwrap();
        assert!(secured_interval(Candidate::One, &pair, &sym(1.0, 0.3)).is_err());
        assert!(weak_favorite_threshold(&pair, &sym(1.0, 0.3)).is_err());
    }

    #[test]
    fn secured_means_winning_against_best_adjustment() {
        let pair = PlatformPair::new(0.25, 0.7).unwrap();
        let p = GameParams::new(0.4, 1.7, 0.3).unwrap();
        for c in Candidate::BOTH {
            let s = secured_interval(c, &pair, &p).unwrap();
            for k in 1..100 {
                let m = s.lo + (s.hi - s.lo) * k as f64 / 100.0;
                assert!(stay_utility(c, &pair, m, &p) > adjusted_utility(c.other(), &pair, m, &p));
            }
        }
    }

    #[test]
    fn weak_favorite_threshold_examples() {
        let pair = PlatformPair::new(0.2, 0.9).unwrap();
        assert!(close(weak_favorite_threshold(&pair, &sym(0.7, 0.3)).unwrap(), 0.55));

        let pair = PlatformPair::new(0.4, 0.8).unwrap();
        let p = GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap();
        let mt = weak_favorite_threshold(&pair, &p).unwrap();
        assert!(close(mt, 0.64));
        let u1 = adjusted_utility(Candidate::One, &pair, mt, &p);
        let u2 = adjusted_utility(Candidate::Two, &pair, mt, &p);
        assert!((u1 - u2).abs() < 1e-12);
        // less flexible candidate 2 loses ground on its own side
        assert!(mt > 0.6);
    }

    #[test]
    fn classify_examples() {
        let pair = PlatformPair::new(1.0 / 3.0, 2.0 / 3.0).unwrap();
        let p = sym(1.0 / 3.0, 0.3);
        let at = |m: f64| classify(&pair, Median::new(m).unwrap(), &p);
        assert_eq!(at(0.2), SubgameStatus::Secured { favorite: Candidate::One });
        assert_eq!(at(0.47), SubgameStatus::Open { favorite: Candidate::One });
        assert_eq!(at(0.53), SubgameStatus::Open { favorite: Candidate::Two });
        assert_eq!(at(0.9), SubgameStatus::Secured { favorite: Candidate::Two });

        let dyadic = PlatformPair::new(0.25, 0.75).unwrap();
        assert_eq!(classify(&dyadic, Median::new(0.5).unwrap(), &p), SubgameStatus::KnifeEdge);

        let pair = PlatformPair::new(0.4, 0.8).unwrap();
        let p = GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap();
        assert_eq!(
            classify(&pair, Median::new(0.62).unwrap(), &p),
            SubgameStatus::WeakFavorite { weak_favorite: Candidate::Two, strong_challenger: Candidate::One }
        );

        let same = PlatformPair::new(0.5, 0.5).unwrap();
        for m in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(classify(&same, Median::new(m).unwrap(), &p), SubgameStatus::Identical);
        }
    }

    #[test]
    fn classify_switches_at_secured_boundary() {
        // x = (0, 1/2), alpha = 2: the secured boundary for candidate 1 sits at 1/6 with
        // utilities -1/36 on both sides of the comparison.
        let pair = PlatformPair::new(0.0, 0.5).unwrap();
        let p = sym(1.0 / 3.0, 0.3);
        let s = secured_interval(Candidate::One, &pair, &p).unwrap();
        assert!(close(s.hi, 1.0 / 6.0));
        let inside = classify(&pair, Median::new(0.16).unwrap(), &p);
        let outside = classify(&pair, Median::new(0.17).unwrap(), &p);
        assert_eq!(inside, SubgameStatus::Secured { favorite: Candidate::One });
        assert_eq!(outside, SubgameStatus::Open { favorite: Candidate::One });
    }

    #[test]
    fn secured_interval_ordering_remark() {
        let p = sym(0.1, 0.3);
        let pair = PlatformPair::new(0.4, 0.6).unwrap();
        let s1 = secured_interval(Candidate::One, &pair, &p).unwrap();
        let s2 = secured_interval(Candidate::Two, &pair, &p).unwrap();
        let mid = 0.5;
        assert!(s1.lo > 0.0 && s2.hi < 1.0, "fixture must be unclamped");
        let chain = [s1.lo, 0.4, s1.hi, mid, s2.lo, 0.6, s2.hi];
        assert!(chain.windows(2).all(|w| w[0] < w[1]), "{chain:?}");
    }
}

//! Catalog of closed-form tail bounds with explicit constants.
//!
//! Each operation returns a [`BoundResult`]: a certified statement of the
//! form `Pr[X >= threshold] <= 2^log2_bound` (or `>=` for lower bounds),
//! together with validity flags for every side condition. Invalid inputs
//! that are merely outside a bound's side conditions produce flags rather
//! than errors, so parameter sweeps stay total; inputs that make the
//! quantity meaningless (a zero mean, an empty summand list) are errors.
//!
//! A bound whose value is >= 1 certifies nothing; it is reported verbatim
//! with [`BoundResult::vacuous`] set rather than clamped or dropped.
//!
//! The families, with `X` an n-step fair ±1 walk, `Bin(n, p)` a binomial
//! count, or the final sum of an adaptive variance-budget game with total
//! budget `v` (see [`crate::adversary`]):
//!
//! | family               | statement                                             |
//! |----------------------|-------------------------------------------------------|
//! | `chebyshev-max`      | `Pr[max_i S_i >= k sqrt(n)] <= 2/k^2`                 |
//! | `poor-fair`          | `Pr[S_n >= k sqrt(n)] <= 2^(-k/2)`, even `k <= sqrt(n)` |
//! | `geo-sum`            | `Pr[sum Y_i >= 2n] <= (4p)^n`, `Pr[Y >= j] = p^j`     |
//! | `geo-sum-int`        | integer-variable variant, threshold `n`               |
//! | `fair-upper`         | `Pr[S_n >= 16 k sqrt(n)] <= 4^(-k^2)`                 |
//! | `fair-lower`         | `Pr[S_n >= k sqrt(n)] >= (1/4)^(16 k^2)`, `k <= sqrt(n)/4` |
//! | `large-upper`        | `Pr[Bin(n,p) >= r mu] <= (4/r)^(r mu)`                |
//! | `large-lower`        | `Pr[Bin(n,p) >= r mu] >= (e r)^(-r mu)`               |
//! | `bennett-poor-high-v`| `Pr[X >= 4 k sqrt(v)] <= 4^(-k)`, `v >= 1`            |
//! | `bennett-poor-low-v` | `Pr[X >= k] <= v^(k/2)`, `v <= 1`                     |
//! | `bennett-small`      | `Pr[X >= 33 k sqrt(v)] <= 4^(-k^2)`, `k <= sqrt(v)`   |
//! | `bennett-large`      | `Pr[X >= 3 r v] <= (32/r)^(-r v / 2)`                 |
//! | `hoeffding-small`    | `Pr[X >= mu + 33 k sqrt(mu)] <= 4^(-k^2)`             |
//! | `hoeffding-large`    | `Pr[X >= mu + 3 r mu] <= (32/r)^(-r mu / 2)`          |

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::prob::{big_ratio, big_ratio_pow, log2_big_ratio, pow2_neg};

/// Tolerance used when checking that a real-valued product (`r mu`, `r v`)
/// is an integer.
pub const INTEGRALITY_TOL: f64 = 1e-9;

/// Which side of the tail probability a bound certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `truth <= bound`.
    Upper,
    /// `truth >= bound`.
    Lower,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Upper => "truth<=bound",
            Direction::Lower => "truth>=bound",
        }
    }
}

/// Identifier for each bound family in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFamily {
    ChebyshevMax,
    PoorFair,
    GeoSum,
    GeoSumInt,
    FairUpper,
    FairLower,
    LargeUpper,
    LargeLower,
    BennettPoorHighV,
    BennettPoorLowV,
    BennettSmall,
    BennettLarge,
    HoeffdingSmall,
    HoeffdingLarge,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 14] = [
        BoundFamily::ChebyshevMax,
        BoundFamily::PoorFair,
        BoundFamily::GeoSum,
        BoundFamily::GeoSumInt,
        BoundFamily::FairUpper,
        BoundFamily::FairLower,
        BoundFamily::LargeUpper,
        BoundFamily::LargeLower,
        BoundFamily::BennettPoorHighV,
        BoundFamily::BennettPoorLowV,
        BoundFamily::BennettSmall,
        BoundFamily::BennettLarge,
        BoundFamily::HoeffdingSmall,
        BoundFamily::HoeffdingLarge,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            BoundFamily::ChebyshevMax => "chebyshev-max",
            BoundFamily::PoorFair => "poor-fair",
            BoundFamily::GeoSum => "geo-sum",
            BoundFamily::GeoSumInt => "geo-sum-int",
            BoundFamily::FairUpper => "fair-upper",
            BoundFamily::FairLower => "fair-lower",
            BoundFamily::LargeUpper => "large-upper",
            BoundFamily::LargeLower => "large-lower",
            BoundFamily::BennettPoorHighV => "bennett-poor-high-v",
            BoundFamily::BennettPoorLowV => "bennett-poor-low-v",
            BoundFamily::BennettSmall => "bennett-small",
            BoundFamily::BennettLarge => "bennett-large",
            BoundFamily::HoeffdingSmall => "hoeffding-small",
            BoundFamily::HoeffdingLarge => "hoeffding-large",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::Lookup(format!("unknown bound family `{s}`")))
    }

    /// Short stable key naming the underlying inequality; the verification
    /// suites use these to audit their own coverage.
    pub fn anchor(&self) -> &'static str {
        match self {
            BoundFamily::ChebyshevMax => "extended-chebyshev",
            BoundFamily::PoorFair => "poor-man-fair",
            BoundFamily::GeoSum => "geometric-sum",
            BoundFamily::GeoSumInt => "geometric-sum-integer",
            BoundFamily::FairUpper => "fair-coin-upper",
            BoundFamily::FairLower => "fair-coin-lower",
            BoundFamily::LargeUpper => "large-deviation-upper",
            BoundFamily::LargeLower => "large-deviation-lower",
            BoundFamily::BennettPoorHighV | BoundFamily::BennettPoorLowV => "bennett-poor-man",
            BoundFamily::BennettSmall => "bennett-small-upper",
            BoundFamily::BennettLarge => "bennett-large-upper",
            BoundFamily::HoeffdingSmall | BoundFamily::HoeffdingLarge => "hoeffding-from-bennett",
        }
    }

    /// Human-readable statement of the inequality this family certifies.
    pub fn citation(&self) -> &'static str {
        match self {
            BoundFamily::ChebyshevMax => {
                "extended Chebyshev inequality for the prefix maximum: Pr[max S_i >= k sqrt(n)] <= 2/k^2"
            }
            BoundFamily::PoorFair => {
                "poor man's Chernoff bound for fair walks: Pr[S_n >= k sqrt(n)] <= 2^(-k/2) for even k <= sqrt(n)"
            }
            BoundFamily::GeoSum => {
                "geometric-sum bound by witness counting: Pr[Y_1 + ... + Y_n >= 2n] <= (4p)^n when Pr[Y >= j] = p^j"
            }
            BoundFamily::GeoSumInt => {
                "geometric-sum bound, integer-variable form: Pr[Y_1 + ... + Y_n >= n] <= (4p)^n"
            }
            BoundFamily::FairUpper => {
                "fair-coin Chernoff upper bound via checkpoint rescaling: Pr[S_n >= 16 k sqrt(n)] <= 4^(-k^2)"
            }
            BoundFamily::FairLower => {
                "fair-coin lower bound from grouped quarter-deviations: Pr[S_n >= k sqrt(n)] >= (1/4)^(16 k^2) for k <= sqrt(n)/4"
            }
            BoundFamily::LargeUpper => {
                "large-deviation binomial upper bound: Pr[Bin(n, p) >= r mu] <= (4/r)^(r mu)"
            }
            BoundFamily::LargeLower => {
                "large-deviation binomial lower bound via exactly-one-success groups: Pr[Bin(n, p) >= r mu] >= (e r)^(-r mu)"
            }
            BoundFamily::BennettPoorHighV => {
                "poor man's bound for adaptive variance budgets (v >= 1): Pr[X >= 4 k sqrt(v)] <= 4^(-k)"
            }
            BoundFamily::BennettPoorLowV => {
                "poor man's bound for adaptive variance budgets (v <= 1): Pr[X >= k] <= v^(k/2)"
            }
            BoundFamily::BennettSmall => {
                "small-deviation bound for adaptive variance budgets: Pr[X >= 33 k sqrt(v)] <= 4^(-k^2) for k <= sqrt(v)"
            }
            BoundFamily::BennettLarge => {
                "large-deviation bound for adaptive variance budgets: Pr[X >= 3 r v] <= (32/r)^(-r v / 2)"
            }
            BoundFamily::HoeffdingSmall => {
                "Hoeffding-style corollary (variance at most mean for 0/1 summands), small deviations: Pr[X >= mu + 33 k sqrt(mu)] <= 4^(-k^2)"
            }
            BoundFamily::HoeffdingLarge => {
                "Hoeffding-style corollary, large deviations: Pr[X >= mu + 3 r mu] <= (32/r)^(-r mu / 2)"
            }
        }
    }
}

/// A certified tail-bound statement.
///
/// Numeric fields are meaningful whenever the inputs are semantically
/// sensible; when `violated` is non-empty the statement is *not* certified
/// and downstream sweeps record it as skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub family: BoundFamily,
    pub direction: Direction,
    /// The tail threshold the statement refers to.
    pub threshold: f64,
    /// Base-2 logarithm of the bound value (may exceed 0 for vacuous bounds).
    pub log2_bound: f64,
    /// Exact rational bound value, when the closed form is rational.
    pub exact_bound: Option<BigRational>,
    /// Names of violated side conditions; empty means the bound applies.
    pub violated: Vec<&'static str>,
}

impl BoundResult {
    fn new(
        family: BoundFamily,
        direction: Direction,
        threshold: f64,
        log2_bound: f64,
        exact_bound: Option<BigRational>,
        violated: Vec<&'static str>,
    ) -> Self {
        if let Some(e) = &exact_bound {
            debug_assert!(
                (log2_big_ratio(e) - log2_bound).abs() < 1e-6,
                "exact/log bound mismatch for {}",
                family.id()
            );
        }
        BoundResult {
            family,
            direction,
            threshold,
            log2_bound,
            exact_bound,
            violated,
        }
    }

    /// True iff every side condition holds.
    pub fn valid(&self) -> bool {
        self.violated.is_empty()
    }

    /// True iff the bound certifies nothing (an upper bound with value >= 1).
    pub fn vacuous(&self) -> bool {
        matches!(self.direction, Direction::Upper) && self.log2_bound >= 0.0
    }

    /// Human-readable statement of the inequality behind this result.
    pub fn citation(&self) -> &'static str {
        self.family.citation()
    }

    /// Stable anchor key for coverage audits.
    pub fn anchor(&self) -> &'static str {
        self.family.anchor()
    }
}

// ---------------------------------------------------------------------------
// Fair-walk bounds
// ---------------------------------------------------------------------------

/// `Pr[max_i S_i >= k sqrt(n)] <= 2/k^2` for real `k >= 1`.
pub fn chebyshev_max_bound(n: u64, k: f64) -> BoundResult {
    let mut violated = Vec::new();
    if !(k >= 1.0) {
        violated.push("k >= 1");
    }
    let threshold = k * (n as f64).sqrt();
    let log2_bound = 1.0 - 2.0 * k.log2();
    let exact = if k >= 1.0 && k.fract() == 0.0 {
        let ki = BigInt::from(k as u64);
        Some(BigRational::new(BigInt::from(2), &ki * &ki))
    } else {
        None
    };
    BoundResult::new(
        BoundFamily::ChebyshevMax,
        Direction::Upper,
        threshold,
        log2_bound,
        exact,
        violated,
    )
}

/// `Pr[S_n >= k sqrt(n)] <= 2^(-k/2)` for even `2 <= k <= sqrt(n)`.
pub fn poor_fair_bound(n: u64, k: u64) -> BoundResult {
    let mut violated = Vec::new();
    if k < 2 {
        violated.push("k >= 2");
    }
    if k % 2 != 0 {
        violated.push("k even");
    }
    if k * k > n {
        violated.push("k <= sqrt(n)");
    }
    let threshold = k as f64 * (n as f64).sqrt();
    let log2_bound = -(k as f64) / 2.0;
    let exact = if k % 2 == 0 { Some(pow2_neg(k / 2)) } else { None };
    BoundResult::new(
        BoundFamily::PoorFair,
        Direction::Upper,
        threshold,
        log2_bound,
        exact,
        violated,
    )
}

/// `Pr[S_n >= 16 k sqrt(n)] <= 4^(-k^2)`, requiring the threshold to be
/// reachable (`16 k sqrt(n) <= n`, i.e. `k <= sqrt(n)/16`).
pub fn fair_upper_bound(n: u64, k: u64) -> BoundResult {
    let mut violated = Vec::new();
    if k < 1 {
        violated.push("k >= 1");
    }
    if 256 * k * k > n {
        violated.push("16 k sqrt(n) <= n");
    }
    let threshold = 16.0 * k as f64 * (n as f64).sqrt();
    let log2_bound = -2.0 * (k * k) as f64;
    BoundResult::new(
        BoundFamily::FairUpper,
        Direction::Upper,
        threshold,
        log2_bound,
        Some(pow2_neg(2 * k * k)),
        violated,
    )
}

/// `Pr[S_n >= k sqrt(n)] >= (1/4)^(16 k^2)` for `1 <= k <= sqrt(n)/4`.
pub fn fair_lower_bound(n: u64, k: u64) -> BoundResult {
    let mut violated = Vec::new();
    if k < 1 {
        violated.push("k >= 1");
    }
    if 16 * k * k > n {
        violated.push("k <= sqrt(n)/4");
    }
    let threshold = k as f64 * (n as f64).sqrt();
    let log2_bound = -32.0 * (k * k) as f64;
    BoundResult::new(
        BoundFamily::FairLower,
        Direction::Lower,
        threshold,
        log2_bound,
        Some(pow2_neg(32 * k * k)),
        violated,
    )
}

// ---------------------------------------------------------------------------
// Geometric sums
// ---------------------------------------------------------------------------

/// `Pr[Y_1 + ... + Y_n >= 2n] <= (4p)^n` when `Pr[Y >= j] = p^j`, via the
/// witness-counting argument (at most `4^n` witness encodings, each of
/// probability at most `p^n`). `integer_variant` moves the threshold to
/// `n` for integer-valued variables.
pub fn geo_sum_bound(n: u64, p: Rational64, integer_variant: bool) -> Result<BoundResult> {
    if n == 0 {
        return Err(Error::Range("need at least one summand".into()));
    }
    if p <= Rational64::zero() || p >= Rational64::one() {
        return Err(Error::Domain(format!(
            "geometric parameter p = {p} must lie strictly inside (0, 1)"
        )));
    }
    let four_p = big_ratio(p) * BigRational::from_integer(BigInt::from(4));
    let mut violated = Vec::new();
    if four_p >= BigRational::one() {
        violated.push("4p < 1");
    }
    let value = big_ratio_pow(&four_p, n as i64);
    let log2_bound = log2_big_ratio(&value);
    let family = if integer_variant {
        BoundFamily::GeoSumInt
    } else {
        BoundFamily::GeoSum
    };
    let threshold = if integer_variant { n as f64 } else { 2.0 * n as f64 };
    Ok(BoundResult::new(
        family,
        Direction::Upper,
        threshold,
        log2_bound,
        Some(value),
        violated,
    ))
}

// ---------------------------------------------------------------------------
// Large deviations for binomials
// ---------------------------------------------------------------------------

/// Large-deviation sandwich for `Pr[Bin(n, p) >= r mu]`, `mu = p n`:
/// upper `(4/r)^(r mu)`, lower `(e r)^(-r mu)`.
///
/// Side conditions surfaced as flags: `r >= 2`, `r mu` a positive integer,
/// `r mu <= n`, and `n` divisible by `r mu` (the equal-groups assumption
/// both proofs lean on).
pub fn large_dev_bounds(n: u64, p: Rational64, r: f64) -> Result<(BoundResult, BoundResult)> {
    if n == 0 {
        return Err(Error::Range("need at least one trial".into()));
    }
    if p <= Rational64::zero() || p > Rational64::new(1, 2) {
        return Err(Error::Domain(format!(
            "success rate p = {p} must lie in (0, 1/2]"
        )));
    }
    let mu_big = big_ratio(p) * BigRational::from_integer(BigInt::from(n));
    let mu = log2_big_ratio(&mu_big).exp2();
    let rmu = r * mu;

    let mut violated = Vec::new();
    if r < 2.0 {
        violated.push("r >= 2");
    }
    let rmu_rounded = rmu.round();
    let integral = (rmu - rmu_rounded).abs() <= INTEGRALITY_TOL * rmu.max(1.0);
    if !integral || rmu_rounded < 1.0 {
        violated.push("r mu a positive integer");
    }
    if rmu > n as f64 + INTEGRALITY_TOL {
        violated.push("r mu <= n");
    }
    if integral && rmu_rounded >= 1.0 && n % (rmu_rounded as u64).max(1) != 0 {
        violated.push("n divisible by r mu");
    }

    let r_integral = r.fract() == 0.0 && r >= 1.0;
    let upper_exact = if r_integral && integral && rmu_rounded >= 1.0 {
        let base = BigRational::new(BigInt::from(4), BigInt::from(r as u64));
        Some(big_ratio_pow(&base, rmu_rounded as i64))
    } else {
        None
    };
    let upper_log2 = rmu * (4.0 / r).log2();
    let lower_log2 = -rmu * (std::f64::consts::E * r).log2();

    let upper = BoundResult::new(
        BoundFamily::LargeUpper,
        Direction::Upper,
        rmu,
        upper_log2,
        upper_exact,
        violated.clone(),
    );
    let lower = BoundResult::new(
        BoundFamily::LargeLower,
        Direction::Lower,
        rmu,
        lower_log2,
        None,
        violated,
    );
    Ok((upper, lower))
}

// ---------------------------------------------------------------------------
// Adaptive variance-budget bounds
// ---------------------------------------------------------------------------

/// Poor man's bound for the final sum of a budget-`v` game:
/// `Pr[X >= 4 k sqrt(v)] <= 4^(-k)` when `v >= 1`, and
/// `Pr[X >= k] <= v^(k/2)` when `v <= 1`. At `v = 1` the two forms meet;
/// the `v >= 1` form is emitted.
pub fn bennett_poor_bound(v: f64, k: u64) -> BoundResult {
    let mut violated = Vec::new();
    if k < 1 {
        violated.push("k >= 1");
    }
    if !(v > 0.0) {
        violated.push("v > 0");
        return BoundResult::new(
            BoundFamily::BennettPoorHighV,
            Direction::Upper,
            0.0,
            0.0,
            None,
            violated,
        );
    }
    if v >= 1.0 {
        BoundResult::new(
            BoundFamily::BennettPoorHighV,
            Direction::Upper,
            4.0 * k as f64 * v.sqrt(),
            -2.0 * k as f64,
            Some(pow2_neg(2 * k)),
            violated,
        )
    } else {
        BoundResult::new(
            BoundFamily::BennettPoorLowV,
            Direction::Upper,
            k as f64,
            (k as f64 / 2.0) * v.log2(),
            None,
            violated,
        )
    }
}

/// Small-deviation bound with a real-valued deviation scale; the public
/// entry point restricts `k` to integers, while the regime selector
/// [`query`] uses this form directly.
fn bennett_small_real(v: f64, k: f64, family: BoundFamily, threshold: f64) -> BoundResult {
    let mut violated = Vec::new();
    if !(v >= 1.0) {
        violated.push("v >= 1");
    }
    if !(k >= 1.0) {
        violated.push("k >= 1");
    }
    if v > 0.0 && k > v.sqrt() + INTEGRALITY_TOL {
        violated.push("k <= sqrt(v)");
    }
    let log2_bound = -2.0 * k * k;
    let exact = if k.fract() == 0.0 && k >= 1.0 {
        let ki = k as u64;
        Some(pow2_neg(2 * ki * ki))
    } else {
        None
    };
    BoundResult::new(family, Direction::Upper, threshold, log2_bound, exact, violated)
}

/// `Pr[X >= 33 k sqrt(v)] <= 4^(-k^2)` for integer `1 <= k <= sqrt(v)`,
/// `v >= 1`, against every strategy with variance budget `v`.
pub fn bennett_small_bound(v: f64, k: u64) -> BoundResult {
    let threshold = 33.0 * k as f64 * v.max(0.0).sqrt();
    bennett_small_real(v, k as f64, BoundFamily::BennettSmall, threshold)
}

/// Large-deviation form with real parameters, shared with [`query`].
fn bennett_large_real(v: f64, r: f64, family: BoundFamily, threshold: f64) -> BoundResult {
    let mut violated = Vec::new();
    if !(v > 0.0) {
        violated.push("v > 0");
        return BoundResult::new(family, Direction::Upper, 0.0, 0.0, None, violated);
    }
    if !(r >= 1.0) {
        violated.push("r >= 1");
    }
    let rv = r * v;
    let rv_rounded = rv.round();
    let integral = (rv - rv_rounded).abs() <= INTEGRALITY_TOL * rv.max(1.0);
    if !integral || rv_rounded < 1.0 {
        violated.push("r v a positive integer");
    }
    if r >= 32.0 {
        violated.push("r < 32 for a nonvacuous bound");
    }
    let log2_bound = -(rv / 2.0) * (32.0 / r).log2();
    // Exact value available when r is an integer and rv/2 an integer power.
    let exact = if r.fract() == 0.0 && r >= 1.0 && integral && (rv_rounded as u64) % 2 == 0 {
        let base = BigRational::new(BigInt::from(r as u64), BigInt::from(32));
        Some(big_ratio_pow(&base, (rv_rounded as i64) / 2))
    } else {
        None
    };
    BoundResult::new(family, Direction::Upper, threshold, log2_bound, exact, violated)
}

/// `Pr[X >= 3 r v] <= (32/r)^(-r v / 2)` for `r >= 1` with `r v` a positive
/// integer, against every strategy with variance budget `v`. Nonvacuous
/// only for `r < 32` (flagged otherwise).
pub fn bennett_large_bound(v: f64, r: f64) -> BoundResult {
    bennett_large_real(v, r, BoundFamily::BennettLarge, 3.0 * r * v)
}

/// Hoeffding-style corollary for sums of independent `[0, 1]`-mean
/// summands: with `mu` the sum of the means, the variance budget is at
/// most `mu`, so the adaptive bounds apply with `v = mu`. Thresholds are
/// reported in absolute position, `mu + deviation`.
pub fn hoeffding_bounds(
    means: &[Rational64],
    k: u64,
    r: f64,
) -> Result<(BoundResult, BoundResult)> {
    if means.is_empty() {
        return Err(Error::Domain("empty summand list".into()));
    }
    let mut mu_big = BigRational::zero();
    for &m in means {
        if m < Rational64::zero() || m > Rational64::one() {
            return Err(Error::Domain(format!("mean {m} outside [0, 1]")));
        }
        mu_big += big_ratio(m);
    }
    if mu_big.is_zero() {
        return Err(Error::Domain(
            "all means are zero; the sum is deterministic".into(),
        ));
    }
    let mu = log2_big_ratio(&mu_big).exp2();
    let small = bennett_small_real(
        mu,
        k as f64,
        BoundFamily::HoeffdingSmall,
        mu + 33.0 * k as f64 * mu.sqrt(),
    );
    let large = bennett_large_real(mu, r, BoundFamily::HoeffdingLarge, mu + 3.0 * r * mu);
    Ok((small, large))
}

// ---------------------------------------------------------------------------
// Regime selection
// ---------------------------------------------------------------------------

/// Select the deviation regime for `Pr[X >= t]` with mean `mu`:
/// thresholds up to `2 mu` are *small* deviations (`t = mu + k sqrt(mu)`),
/// beyond that *large* (`t = r mu`). Returns the canonical bound of the
/// selected family at the derived `k` or `r`. Thresholds at or below the
/// mean are a domain error.
pub fn query(mu: f64, n: u64, t: f64) -> Result<BoundResult> {
    if !(mu > 0.0) {
        return Err(Error::Domain("mean must be positive".into()));
    }
    if mu > n as f64 {
        return Err(Error::Domain(format!(
            "mean {mu} exceeds the number of summands {n}"
        )));
    }
    if t <= mu {
        return Err(Error::Domain(format!(
            "threshold {t} is at or below the mean {mu}; the upper-tail \
             regimes do not apply"
        )));
    }
    if t <= 2.0 * mu {
        let k = (t - mu) / mu.sqrt();
        Ok(bennett_small_real(
            mu,
            k,
            BoundFamily::HoeffdingSmall,
            mu + 33.0 * k * mu.sqrt(),
        ))
    } else {
        let r = t / mu;
        Ok(bennett_large_real(
            mu,
            r,
            BoundFamily::HoeffdingLarge,
            mu + 3.0 * r * mu,
        ))
    }
}

//! Ground-truth probabilities for small instances.
//!
//! Everything here is an *oracle*: a slow-but-trustworthy computation used
//! to judge the closed-form bounds and the Monte Carlo estimators. Two modes
//! are supported throughout:
//!
//! * exact big-rational arithmetic (zero-tolerance comparisons, capped at
//!   moderate instance sizes), and
//! * log-space `f64` arithmetic with stable summation (scales far past the
//!   point where probabilities underflow).
//!
//! The quantities covered:
//!
//! * `binom_tail` — upper tails `Pr[Bin(n, p) >= t]`.
//! * `walk_tail` — upper tails `Pr[S_n >= t]` of the n-step fair ±1 walk.
//! * `prefix_max_tail` — `Pr[max_i S_i >= m]`, via an absorbing-barrier DP
//!   and independently via the reflection identity
//!   `Pr[max >= m] = 2 Pr[S_n >= m] - Pr[S_n = m]`; the two must agree.
//! * `hitting_time_mean` — expected first time a fair walk reaches ±r,
//!   obtained by solving the first-step linear system exactly.
//! * `compositions_count` / witness encode/decode — the counting layer
//!   behind the geometric-sum bound: weak compositions of `s` into `m`
//!   parts number `C(s+m-1, m-1)`, and each composition has a unique
//!   zeros-then-one bit encoding of length `s + m`.
//! * `geometric_sum_tail` — exact truncated convolution brackets for sums
//!   of iid integer-valued variables with `Pr[Y >= j] = p^j`.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::prob::{big_ratio, big_ratio_pow, log2_add, log2_sum, Prob2};

/// Largest `n` for which exact binomial/walk tails are computed.
pub const EXACT_BINOMIAL_CAP: u64 = 4096;
/// Largest `n` for which the absorbing-barrier DP runs in exact mode.
pub const PREFIX_EXACT_CAP: u64 = 1024;
/// Largest `n` for which the absorbing-barrier DP runs at all (log mode
/// above [`PREFIX_EXACT_CAP`]); the reflection method has no such cap.
pub const PREFIX_LOG_CAP: u64 = 4096;
/// Caps for the exact geometric-sum convolution.
pub const GEO_N_CAP: u64 = 4096;
pub const GEO_THRESHOLD_CAP: u64 = 512;
/// Default per-variable truncation margin: `tail_cap = t + 64`.
pub const DEFAULT_TAIL_CAP_MARGIN: u64 = 64;

/// Arithmetic mode for tail computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Big-rational arithmetic; result carries an exact witness.
    ExactRational,
    /// Term-wise log-space `f64` with stable summation.
    FloatLog,
}

/// Method for the prefix-maximum tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixMethod {
    /// Absorbing-barrier dynamic program over (step, current sum).
    Dp,
    /// Reflection identity `2 Pr[S_n >= m] - Pr[S_n = m]`.
    Reflection,
}

/// Step law for an iid tail query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepLaw {
    /// Fair ±1 steps.
    FairUnit,
    /// 0/1 steps with success probability `p <= 1/2`.
    Bernoulli(Rational64),
}

/// A validated "probability that an n-step iid sum reaches a threshold"
/// query. The threshold is an integer; direction is always `>=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailQuery {
    pub n: u64,
    pub law: StepLaw,
    pub threshold: i64,
}

impl TailQuery {
    pub fn new(n: u64, law: StepLaw, threshold: i64) -> Result<Self> {
        let q = TailQuery { n, law, threshold };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n as i64;
        match self.law {
            StepLaw::FairUnit => {
                if self.threshold < -n || self.threshold > n {
                    return Err(Error::Range(format!(
                        "walk threshold {} outside [-{n}, {n}]",
                        self.threshold
                    )));
                }
            }
            StepLaw::Bernoulli(p) => {
                if p < Rational64::zero() || p > Rational64::new(1, 2) {
                    return Err(Error::Range(format!(
                        "bernoulli rate {p} outside [0, 1/2]"
                    )));
                }
                if self.threshold < 0 || self.threshold > n {
                    return Err(Error::Range(format!(
                        "bernoulli threshold {} outside [0, {n}]",
                        self.threshold
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ground-truth tail probability for this query (exact when in cap).
    pub fn tail(&self) -> Result<Prob2> {
        match self.law {
            StepLaw::FairUnit => walk_tail(self.n, self.threshold),
            StepLaw::Bernoulli(p) => {
                let mode = if self.n <= EXACT_BINOMIAL_CAP {
                    Mode::ExactRational
                } else {
                    Mode::FloatLog
                };
                binom_tail(self.n, p, self.threshold as u64, mode)
            }
        }
    }
}

/// First-passage query: time for a fair walk to reach ±r, optionally
/// truncated at `horizon` steps (the truncation matters only to the
/// Monte Carlo estimator; the exact mean ignores it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingQuery {
    pub r: u64,
    pub horizon: Option<u64>,
}

impl HittingQuery {
    pub fn new(r: u64, horizon: Option<u64>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Range("hitting radius r must be >= 1".into()));
        }
        if let Some(h) = horizon {
            if h < r {
                return Err(Error::Range(format!(
                    "horizon {h} shorter than radius {r}: the walk cannot reach ±{r}"
                )));
            }
        }
        Ok(HittingQuery { r, horizon })
    }
}

// ---------------------------------------------------------------------------
// Binomial machinery
// ---------------------------------------------------------------------------

/// Exact binomial coefficient `C(n, k)`.
fn binom_coeff(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut res = BigUint::one();
    for j in 0..k {
        res = res * (n - j) / (j + 1);
    }
    res
}

fn check_p_range(p: Rational64) -> Result<()> {
    if p < Rational64::zero() || p > Rational64::one() {
        return Err(Error::Range(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Exact `Pr[Bin(n, p) >= t]` as a big rational.
fn binom_upper_tail_exact(n: u64, p: Rational64, t: u64) -> BigRational {
    if t == 0 {
        return BigRational::one();
    }
    let pn = BigUint::from(*p.numer() as u64);
    let pd = BigUint::from(*p.denom() as u64);
    let q = &pd - &pn;
    if pn.is_zero() {
        return BigRational::zero(); // p = 0, t >= 1
    }
    if q.is_zero() {
        return BigRational::one(); // p = 1, t <= n
    }
    // term_i = C(n, i) * pn^i * q^(n-i); all updates are exact divisions.
    let mut c = binom_coeff(n, t);
    let mut pp = pn.pow(t as u32);
    let mut qq = q.pow((n - t) as u32);
    let mut acc = &c * &pp * &qq;
    for i in t..n {
        c = c * (n - i) / (i + 1);
        pp = &pp * &pn;
        qq = &qq / &q;
        acc += &c * &pp * &qq;
    }
    let denom = pd.pow(n as u32);
    BigRational::new(BigInt::from(acc), BigInt::from(denom))
}

/// Cumulative sums of `ln i`, Kahan-compensated so the accumulated error
/// stays near one ulp even at `n ~ 10^5`.
fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (i, slot) in table.iter_mut().enumerate().skip(1) {
        let y = (i as f64).ln() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        *slot = sum;
    }
    table
}

/// `Pr[Bin(n, p) >= t]` in log space.
fn binom_upper_tail_log2(n: u64, p: Rational64, t: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    if p.is_zero() {
        return f64::NEG_INFINITY;
    }
    if p.is_one() {
        return 0.0;
    }
    let lnf = ln_factorial_table(n as usize);
    let ln2 = std::f64::consts::LN_2;
    let lp = (*p.numer() as f64).log2() - (*p.denom() as f64).log2();
    let lq = ((p.denom() - p.numer()) as f64).log2() - (*p.denom() as f64).log2();
    let terms: Vec<f64> = (t..=n)
        .map(|i| {
            let lc = (lnf[n as usize] - lnf[i as usize] - lnf[(n - i) as usize]) / ln2;
            lc + i as f64 * lp + (n - i) as f64 * lq
        })
        .collect();
    log2_sum(&terms).min(0.0)
}

/// Upper tail `Pr[Bin(n, p) >= t]`.
///
/// Exact mode is capped at `n <=` [`EXACT_BINOMIAL_CAP`]; log mode scales
/// to `n ~ 10^5`. In log mode the full-support sum equals 1 to within 1e-9
/// (see the normalization test).
pub fn binom_tail(n: u64, p: Rational64, t: u64, mode: Mode) -> Result<Prob2> {
    check_p_range(p)?;
    if t > n {
        return Err(Error::Range(format!("threshold {t} exceeds n = {n}")));
    }
    match mode {
        Mode::ExactRational => {
            if n > EXACT_BINOMIAL_CAP {
                return Err(Error::Capacity(format!(
                    "exact binomial tails are capped at n <= {EXACT_BINOMIAL_CAP} (got {n})"
                )));
            }
            Ok(Prob2::from_exact(binom_upper_tail_exact(n, p, t)))
        }
        Mode::FloatLog => Ok(Prob2::from_log2(binom_upper_tail_log2(n, p, t))),
    }
}

// ---------------------------------------------------------------------------
// Fair-walk tails
// ---------------------------------------------------------------------------

/// Heads count threshold equivalent to the walk event `S_n >= t`:
/// with `S_n = 2H - n`, the event is `H >= ceil((n + t) / 2)`.
fn walk_heads_threshold(n: u64, t: i64) -> i64 {
    (n as i64 + t + 1).div_euclid(2)
}

/// Upper tail `Pr[S_n >= t]` for the fair ±1 walk, any integer `t` in
/// `[-n, n]`. Parity is handled internally (`Pr[S >= t]` with `t` of the
/// wrong parity equals `Pr[S >= t+1]`). Exact for `n <=`
/// [`EXACT_BINOMIAL_CAP`], log-space beyond.
pub fn walk_tail(n: u64, t: i64) -> Result<Prob2> {
    let ni = n as i64;
    if t < -ni || t > ni {
        return Err(Error::Range(format!(
            "walk threshold {t} outside [-{n}, {n}]"
        )));
    }
    let h = walk_heads_threshold(n, t);
    if h <= 0 {
        return Ok(Prob2::one());
    }
    let half = Rational64::new(1, 2);
    if n <= EXACT_BINOMIAL_CAP {
        Ok(Prob2::from_exact(binom_upper_tail_exact(n, half, h as u64)))
    } else {
        Ok(Prob2::from_log2(binom_upper_tail_log2(n, half, h as u64)))
    }
}

/// Point probability `Pr[S_n = m]` (exact), zero when parity forbids it.
fn walk_point_exact(n: u64, m: i64) -> BigRational {
    let ni = n as i64;
    if m < -ni || m > ni || (ni + m) % 2 != 0 {
        return BigRational::zero();
    }
    let h = ((ni + m) / 2) as u64;
    BigRational::new(
        BigInt::from(binom_coeff(n, h)),
        BigInt::from(BigUint::one() << n),
    )
}

/// `log2 Pr[S_n = m]` via the log-space binomial machinery.
fn walk_point_log2(n: u64, m: i64) -> f64 {
    let ni = n as i64;
    if m < -ni || m > ni || (ni + m) % 2 != 0 {
        return f64::NEG_INFINITY;
    }
    let h = ((ni + m) / 2) as u64;
    let tail_h = binom_upper_tail_log2(n, Rational64::new(1, 2), h);
    if h == n {
        return tail_h;
    }
    let tail_h1 = binom_upper_tail_log2(n, Rational64::new(1, 2), h + 1);
    // Pr[H = h] = Pr[H >= h] - Pr[H >= h+1], evaluated stably in log space.
    let ratio = (tail_h1 - tail_h).exp2();
    tail_h + (1.0 - ratio).max(0.0).log2()
}

// ---------------------------------------------------------------------------
// Prefix-maximum tails
// ---------------------------------------------------------------------------

/// Exact absorbing-barrier DP: counts paths whose prefix maximum reaches
/// `m`, weighting a path absorbed at step `j` by `2^(n-j)` free
/// continuations. Result is `absorbed / 2^n`.
fn prefix_max_dp_exact(n: u64, m: u64) -> BigRational {
    let n_us = n as usize;
    let m_us = m as usize;
    // Sum s ranges over [-n, m-1]; index = s + n.
    let width = n_us + m_us;
    let mut alive = vec![BigUint::zero(); width];
    alive[n_us] = BigUint::one(); // start at 0
    let mut absorbed = BigUint::zero();
    let mut next = vec![BigUint::zero(); width];
    for _ in 0..n_us {
        absorbed = (&absorbed << 1) + &alive[width - 1];
        for (s, slot) in next.iter_mut().enumerate() {
            let mut v = BigUint::zero();
            if s > 0 {
                v += &alive[s - 1];
            }
            if s + 1 < width {
                v += &alive[s + 1];
            }
            *slot = v;
        }
        std::mem::swap(&mut alive, &mut next);
    }
    BigRational::new(
        BigInt::from(absorbed),
        BigInt::from(BigUint::one() << n_us),
    )
}

/// Log-space version of the same DP.
fn prefix_max_dp_log2(n: u64, m: u64) -> f64 {
    let n_us = n as usize;
    let m_us = m as usize;
    let width = n_us + m_us;
    let mut alive = vec![f64::NEG_INFINITY; width];
    alive[n_us] = 0.0;
    let mut absorbed = f64::NEG_INFINITY;
    let mut next = vec![f64::NEG_INFINITY; width];
    for _ in 0..n_us {
        absorbed = log2_add(absorbed, alive[width - 1] - 1.0);
        for (s, slot) in next.iter_mut().enumerate() {
            let from_left = if s > 0 { alive[s - 1] - 1.0 } else { f64::NEG_INFINITY };
            let from_right = if s + 1 < width {
                alive[s + 1] - 1.0
            } else {
                f64::NEG_INFINITY
            };
            *slot = log2_add(from_left, from_right);
        }
        std::mem::swap(&mut alive, &mut next);
    }
    absorbed.min(0.0)
}

/// Tail of the prefix maximum: `Pr[max_{1<=i<=n} S_i >= m]` for a fair
/// ±1 walk, `1 <= m <= n`.
///
/// `Dp` runs exactly for `n <=` [`PREFIX_EXACT_CAP`] and in log space up
/// to [`PREFIX_LOG_CAP`]; `Reflection` runs exactly up to
/// [`EXACT_BINOMIAL_CAP`] and in log space beyond. In exact mode the two
/// methods agree to the last bit.
pub fn prefix_max_tail(n: u64, m: u64, method: PrefixMethod) -> Result<Prob2> {
    if m < 1 || m > n {
        return Err(Error::Range(format!(
            "prefix-max threshold {m} outside [1, {n}]"
        )));
    }
    match method {
        PrefixMethod::Dp => {
            if n <= PREFIX_EXACT_CAP {
                Ok(Prob2::from_exact(prefix_max_dp_exact(n, m)))
            } else if n <= PREFIX_LOG_CAP {
                Ok(Prob2::from_log2(prefix_max_dp_log2(n, m)))
            } else {
                Err(Error::Capacity(format!(
                    "barrier DP capped at n <= {PREFIX_LOG_CAP} (got {n}); use the reflection method"
                )))
            }
        }
        PrefixMethod::Reflection => {
            if n <= EXACT_BINOMIAL_CAP {
                let tail = binom_upper_tail_exact(
                    n,
                    Rational64::new(1, 2),
                    walk_heads_threshold(n, m as i64).max(0) as u64,
                );
                let point = walk_point_exact(n, m as i64);
                let two = BigRational::from_integer(BigInt::from(2));
                Ok(Prob2::from_exact(two * tail - point))
            } else {
                let t = walk_tail(n, m as i64)?.log2();
                let p = walk_point_log2(n, m as i64);
                // 2T - P = T * (2 - P/T); the ratio P/T is at most 1.
                let ratio = (p - t).exp2();
                Ok(Prob2::from_log2(t + (2.0 - ratio).log2()))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Hitting times
// ---------------------------------------------------------------------------

/// Exact mean first-passage time to ±r, by solving the first-step system
/// `E[s] = 1 + (E[s-1] + E[s+1]) / 2` on states `s in (-r, r)` with
/// absorbing boundaries, via exact tridiagonal elimination. The closed
/// form `r^2` is *not* assumed anywhere; it must emerge from the solve.
pub fn hitting_time_mean_exact(r: u64) -> Result<BigRational> {
    if r == 0 {
        return Err(Error::Range("hitting radius r must be >= 1".into()));
    }
    if r > 4096 {
        return Err(Error::Capacity("hitting radius capped at 4096".into()));
    }
    let size = (2 * r - 1) as usize;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one = BigRational::one();
    // Tridiagonal system: -1/2 E[j-1] + E[j] - 1/2 E[j+1] = 1.
    let a = -half.clone();
    let c = -half;
    let mut cp = vec![BigRational::zero(); size];
    let mut dp = vec![BigRational::zero(); size];
    cp[0] = c.clone();
    dp[0] = one.clone();
    for j in 1..size {
        let denom = &one - &a * &cp[j - 1];
        cp[j] = &c / &denom;
        dp[j] = (&one - &a * &dp[j - 1]) / &denom;
    }
    let mut e = vec![BigRational::zero(); size];
    e[size - 1] = dp[size - 1].clone();
    for j in (0..size - 1).rev() {
        e[j] = &dp[j] - &cp[j] * &e[j + 1];
    }
    Ok(e[(r - 1) as usize].clone()) // state s = 0
}

/// Mean first-passage time to ±r as `f64` (from the exact solve).
pub fn hitting_time_mean(q: &HittingQuery) -> Result<f64> {
    let exact = hitting_time_mean_exact(q.r)?;
    let num = exact.numer().to_f64().ok_or_else(|| {
        Error::Capacity("hitting-time mean does not fit in f64".into())
    })?;
    let den = exact.denom().to_f64().unwrap_or(f64::NAN);
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Compositions and witness encodings
// ---------------------------------------------------------------------------

/// Number of weak compositions of `total` into `parts` ordered
/// non-negative parts: `C(total + parts - 1, parts - 1)`.
pub fn compositions_count(total: u64, parts: u64) -> Result<BigUint> {
    if parts == 0 {
        return Err(Error::Domain(
            "a composition needs at least one part".into(),
        ));
    }
    Ok(binom_coeff(total + parts - 1, parts - 1))
}

/// A weak composition `(q_1, ..., q_m)` awaiting bit encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSequence {
    pub q: Vec<u64>,
}

impl WitnessSequence {
    pub fn new(q: Vec<u64>) -> Self {
        WitnessSequence { q }
    }

    pub fn parts(&self) -> u64 {
        self.q.len() as u64
    }

    pub fn total(&self) -> u64 {
        self.q.iter().sum()
    }
}

/// Encode a composition as bits: each part `q_i` becomes `q_i` zeros
/// followed by a single one. `(2, 0, 1)` encodes to `"001101"`; the
/// length is always `total + parts`.
pub fn witness_encode(w: &WitnessSequence) -> String {
    let mut s = String::with_capacity((w.total() + w.parts()) as usize);
    for &qi in &w.q {
        for _ in 0..qi {
            s.push('0');
        }
        s.push('1');
    }
    s
}

/// Invert [`witness_encode`]. Fails on characters outside `{0, 1}` and on
/// trailing zeros (every part must be terminated by a one).
pub fn witness_decode(bits: &str) -> Result<WitnessSequence> {
    let mut q = Vec::new();
    let mut zeros = 0u64;
    for ch in bits.chars() {
        match ch {
            '0' => zeros += 1,
            '1' => {
                q.push(zeros);
                zeros = 0;
            }
            other => {
                return Err(Error::Range(format!(
                    "witness bit string contains `{other}`"
                )))
            }
        }
    }
    if zeros > 0 {
        return Err(Error::Range(
            "witness bit string has trailing zeros with no terminating one".into(),
        ));
    }
    Ok(WitnessSequence::new(q))
}

// ---------------------------------------------------------------------------
// Geometric sums
// ---------------------------------------------------------------------------

/// Exact bracket on a tail probability: `lower <= truth <= upper`, and for
/// [`geometric_sum_tail`] the upper endpoint *is* the truth (see below).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbInterval {
    pub lower: Prob2,
    pub upper: Prob2,
}

/// Tail `Pr[Y_1 + ... + Y_n >= t]` for iid non-negative integer variables
/// with `Pr[Y >= j] = p^j` (so `Pr[Y = j] = p^j (1 - p)`).
///
/// Each variable is truncated at `tail_cap`; the convolution of the
/// truncated laws gives the lower endpoint, and the mass lost to
/// truncation is added back to form the upper endpoint. Because the
/// variables are non-negative and `tail_cap >= t`, any trajectory with a
/// truncated variable already satisfies the event, so the upper endpoint
/// equals the exact tail; the bracket width only reports how much the
/// truncated convolution resolved on its own.
pub fn geometric_sum_tail(
    n: u64,
    p: Rational64,
    t: u64,
    tail_cap: u64,
) -> Result<ProbInterval> {
    if n == 0 {
        return Err(Error::Range("need at least one summand".into()));
    }
    if n > GEO_N_CAP {
        return Err(Error::Capacity(format!(
            "geometric-sum convolution capped at n <= {GEO_N_CAP}"
        )));
    }
    if p <= Rational64::zero() || p >= Rational64::one() {
        return Err(Error::Domain(format!(
            "geometric parameter p = {p} must lie strictly inside (0, 1)"
        )));
    }
    if t > GEO_THRESHOLD_CAP {
        return Err(Error::Capacity(format!(
            "geometric-sum threshold capped at {GEO_THRESHOLD_CAP}"
        )));
    }
    if tail_cap < t {
        return Err(Error::Capacity(format!(
            "tail_cap {tail_cap} is below the threshold {t}; the truncated \
             support cannot decide the event"
        )));
    }
    if t == 0 {
        return Ok(ProbInterval {
            lower: Prob2::one(),
            upper: Prob2::one(),
        });
    }

    let p_big = big_ratio(p);
    let one = BigRational::one();
    let one_minus_p = &one - &p_big;
    // Powers p^0 .. p^t (enough for pmf entries below t and tail exponents
    // up to t); p^(cap+1) is computed separately so a huge cap stays cheap.
    let mut powers = Vec::with_capacity(t as usize + 1);
    powers.push(one.clone());
    for j in 1..=t as usize {
        let prev = &powers[j - 1];
        powers.push(prev * &p_big);
    }
    let p_cap1 = big_ratio_pow(&p_big, tail_cap as i64 + 1);
    let pmf_total = &one - &p_cap1;
    // Pr[Y' >= j] for the truncated variable, j in [1, t].
    let tail_ge = |j: usize| -> BigRational { &powers[j] - &p_cap1 };

    let t_us = t as usize;
    let mut dist = vec![BigRational::zero(); t_us]; // mass at sums 0..t-1
    let mut bucket = BigRational::zero(); // mass at sums >= t
    dist[0] = one.clone();
    let mut next = vec![BigRational::zero(); t_us];
    for _ in 0..n {
        let mut new_bucket = &bucket * &pmf_total;
        for (x, mass) in dist.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            new_bucket += mass * tail_ge(t_us - x);
        }
        for (j, slot) in next.iter_mut().enumerate() {
            let mut v = BigRational::zero();
            for x in 0..=j {
                let m = &dist[x];
                if m.is_zero() {
                    continue;
                }
                // pmf[j - x] = p^(j-x) (1 - p), j - x < t <= cap.
                v += m * &powers[j - x] * &one_minus_p;
            }
            *slot = v;
        }
        std::mem::swap(&mut dist, &mut next);
        bucket = new_bucket;
    }

    let miss = &one - big_ratio_pow(&pmf_total, n as i64);
    let upper = &bucket + &miss;
    Ok(ProbInterval {
        lower: Prob2::from_exact(bucket),
        upper: Prob2::from_exact(upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::pow2_neg;
    use proptest::prelude::*;

    fn br(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    // -- independent enumeration oracles (used only by tests) --------------

    /// Brute-force walk statistics by enumerating all 2^n sign paths.
    fn enumerate_walk(n: u32) -> Vec<(i64, i64)> {
        // Returns (final sum, prefix max) per path.
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let mut z = 0i64;
            let mut max = 0i64;
            for b in 0..n {
                z += if mask >> b & 1 == 1 { 1 } else { -1 };
                max = max.max(z);
            }
            out.push((z, max));
        }
        out
    }

    /// Brute-force count of weak compositions of `total` into `parts`.
    fn enumerate_compositions(total: u64, parts: u64) -> Vec<Vec<u64>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in enumerate_compositions(total - first, parts - 1) {
                let mut v = vec![first];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    // -- binomial tails ----------------------------------------------------

    #[test]
    fn binom_tail_frozen_values() {
        let half = Rational64::new(1, 2);
        let one = binom_tail(10, half, 0, Mode::ExactRational).unwrap();
        assert_eq!(one.exact().unwrap(), &BigRational::one());

        let top = binom_tail(10, half, 10, Mode::ExactRational).unwrap();
        assert_eq!(top.exact().unwrap(), &pow2_neg(10));

        // Pr[Bin(64, 1/16) >= 32] <= 2^-32, and >= (8e)^-32.
        let spread = binom_tail(64, Rational64::new(1, 16), 32, Mode::ExactRational).unwrap();
        assert!(spread.exact().unwrap() <= &pow2_neg(32));
        let lower_log2 = -32.0 * (8.0 * std::f64::consts::E).log2();
        assert!(spread.log2() >= lower_log2);
    }

    #[test]
    fn binom_tail_rejects_bad_inputs() {
        let half = Rational64::new(1, 2);
        assert!(matches!(
            binom_tail(10, half, 11, Mode::ExactRational),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            binom_tail(10, Rational64::new(3, 2), 1, Mode::ExactRational),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            binom_tail(5000, half, 1, Mode::ExactRational),
            Err(Error::Capacity(_))
        ));
        // Same instance succeeds in log mode.
        assert!(binom_tail(5000, half, 1, Mode::FloatLog).is_ok());
    }

    #[test]
    fn binom_log_mode_is_normalized() {
        // Tail at 0 is the full-support sum; it must be 1 to within 1e-9.
        for (n, p) in [(10_000u64, Rational64::new(1, 3)), (50_000, Rational64::new(1, 7))] {
            let t = binom_tail(n, p, 0, Mode::FloatLog).unwrap();
            assert!(t.log2().abs() <= 1e-9, "n={n}: log2 = {}", t.log2());
            let t1 = binom_tail(n, p, 1, Mode::FloatLog).unwrap();
            assert!(t1.log2().abs() <= 1e-9);
        }
    }

    #[test]
    fn binom_modes_agree() {
        for (n, p, t) in [
            (100u64, Rational64::new(1, 3), 50u64),
            (256, Rational64::new(1, 16), 40),
            (1024, Rational64::new(1, 2), 600),
        ] {
            let exact = binom_tail(n, p, t, Mode::ExactRational).unwrap();
            let log = binom_tail(n, p, t, Mode::FloatLog).unwrap();
            assert!(
                (exact.log2() - log.log2()).abs() <= 1e-9,
                "({n}, {p}, {t}): {} vs {}",
                exact.log2(),
                log.log2()
            );
        }
    }

    #[test]
    fn binom_degenerate_rates() {
        let zero = Rational64::zero();
        let one = Rational64::one();
        assert_eq!(
            binom_tail(8, zero, 0, Mode::ExactRational).unwrap().log2(),
            0.0
        );
        assert_eq!(
            binom_tail(8, zero, 3, Mode::ExactRational).unwrap().to_f64(),
            0.0
        );
        assert_eq!(
            binom_tail(8, one, 8, Mode::ExactRational).unwrap().log2(),
            0.0
        );
    }

    // -- walk tails --------------------------------------------------------

    #[test]
    fn walk_tail_frozen_values() {
        // Pr[S_16 >= 0] = (1 + C(16,8)/2^16) / 2 = 39203/65536.
        let at0 = walk_tail(16, 0).unwrap();
        assert_eq!(at0.exact().unwrap(), &br(39203, 65536));
        assert!((at0.to_f64() - 0.598190).abs() < 1e-6);

        // Pr[S_16 >= 1] = (1 - C(16,8)/2^16) / 2 = 26333/65536 ~ 0.401810.
        let at1 = walk_tail(16, 1).unwrap();
        assert_eq!(at1.exact().unwrap(), &br(26333, 65536));
        assert!((at1.to_f64() - 0.401810).abs() < 1e-6);

        // Pr[S_4 >= 4] = 1/16; the -n threshold is certain.
        assert_eq!(walk_tail(4, 4).unwrap().exact().unwrap(), &br(1, 16));
        assert_eq!(walk_tail(4, -4).unwrap().log2(), 0.0);
        assert!(matches!(walk_tail(4, 5), Err(Error::Range(_))));
    }

    #[test]
    fn walk_tail_matches_enumeration() {
        for n in 1u32..=12 {
            let paths = enumerate_walk(n);
            let total = paths.len() as i64;
            for t in -(n as i64)..=(n as i64) {
                let count = paths.iter().filter(|(z, _)| *z >= t).count() as i64;
                let got = walk_tail(n as u64, t).unwrap();
                assert_eq!(
                    got.exact().unwrap(),
                    &br(count, total),
                    "n={n}, t={t}"
                );
            }
        }
    }

    #[test]
    fn walk_tail_symmetry() {
        // Pr[S_n >= t] equals Pr[S_n <= -t], computed here independently
        // as a lower binomial sum.
        for n in [9u64, 16, 21] {
            for t in 0..=(n as i64) {
                let upper = walk_tail(n, t).unwrap();
                // H <= floor((n - t) / 2) is the complement-side event.
                let h_max = (n as i64 - t).div_euclid(2);
                let mut acc = BigUint::zero();
                for i in 0..=h_max.max(-1) {
                    if i >= 0 {
                        acc += binom_coeff(n, i as u64);
                    }
                }
                let lower = BigRational::new(
                    BigInt::from(acc),
                    BigInt::from(BigUint::one() << n),
                );
                assert_eq!(upper.exact().unwrap(), &lower, "n={n}, t={t}");
            }
        }
    }

    #[test]
    fn walk_tail_monotone_in_threshold() {
        for n in [10u64, 17] {
            let mut prev = Prob2::one();
            for t in -(n as i64)..=(n as i64) {
                let cur = walk_tail(n, t).unwrap();
                assert!(cur.exact().unwrap() <= prev.exact().unwrap());
                prev = cur;
            }
        }
    }

    // -- prefix-maximum tails ----------------------------------------------

    #[test]
    fn prefix_max_frozen_values() {
        for method in [PrefixMethod::Dp, PrefixMethod::Reflection] {
            assert_eq!(
                prefix_max_tail(2, 1, method).unwrap().exact().unwrap(),
                &br(1, 2)
            );
            assert_eq!(
                prefix_max_tail(4, 2, method).unwrap().exact().unwrap(),
                &br(3, 8)
            );
            assert_eq!(
                prefix_max_tail(1, 1, method).unwrap().exact().unwrap(),
                &br(1, 2)
            );
        }
        assert!(matches!(prefix_max_tail(4, 0, PrefixMethod::Dp), Err(Error::Range(_))));
        assert!(matches!(prefix_max_tail(4, 5, PrefixMethod::Dp), Err(Error::Range(_))));
    }

    #[test]
    fn prefix_max_matches_enumeration() {
        for n in 1u32..=12 {
            let paths = enumerate_walk(n);
            let total = paths.len() as i64;
            for m in 1..=(n as i64) {
                let count = paths.iter().filter(|(_, max)| *max >= m).count() as i64;
                let got = prefix_max_tail(n as u64, m as u64, PrefixMethod::Dp).unwrap();
                assert_eq!(got.exact().unwrap(), &br(count, total), "n={n}, m={m}");
            }
        }
    }

    #[test]
    fn dp_and_reflection_agree_exactly() {
        for n in 1u64..=40 {
            for m in 1..=n {
                let dp = prefix_max_tail(n, m, PrefixMethod::Dp).unwrap();
                let refl = prefix_max_tail(n, m, PrefixMethod::Reflection).unwrap();
                assert_eq!(
                    dp.exact().unwrap(),
                    refl.exact().unwrap(),
                    "n={n}, m={m}"
                );
            }
        }
    }

    #[test]
    fn prefix_max_sandwiched_by_walk_tail() {
        // Pr[S_n >= m] <= Pr[max >= m] <= 2 Pr[S_n >= m], exactly.
        let two = BigRational::from_integer(BigInt::from(2));
        for n in [16u64, 33, 40] {
            for m in 1..=n {
                let walk = walk_tail(n, m as i64).unwrap();
                let max = prefix_max_tail(n, m, PrefixMethod::Dp).unwrap();
                assert!(max.exact().unwrap() >= walk.exact().unwrap());
                assert!(max.exact().unwrap() <= &(&two * walk.exact().unwrap()));
            }
        }
    }

    #[test]
    fn prefix_max_log_mode_tracks_exact() {
        // Above the exact DP cap the log DP and exact reflection still agree.
        let n = PREFIX_EXACT_CAP + 6;
        for m in [1u64, 31, 64] {
            let dp = prefix_max_tail(n, m, PrefixMethod::Dp).unwrap();
            let refl = prefix_max_tail(n, m, PrefixMethod::Reflection).unwrap();
            assert!(dp.exact().is_none());
            assert!(
                (dp.log2() - refl.log2()).abs() < 1e-6,
                "m={m}: {} vs {}",
                dp.log2(),
                refl.log2()
            );
        }
    }

    // -- hitting times -----------------------------------------------------

    #[test]
    fn hitting_time_mean_is_r_squared() {
        for r in 1u64..=32 {
            let exact = hitting_time_mean_exact(r).unwrap();
            assert_eq!(
                exact,
                BigRational::from_integer(BigInt::from(r * r)),
                "r={r}"
            );
        }
        let q = HittingQuery::new(2, None).unwrap();
        assert_eq!(hitting_time_mean(&q).unwrap(), 4.0);
    }

    #[test]
    fn hitting_query_validation() {
        assert!(matches!(HittingQuery::new(0, None), Err(Error::Range(_))));
        assert!(matches!(HittingQuery::new(4, Some(3)), Err(Error::Range(_))));
        assert!(HittingQuery::new(4, Some(4)).is_ok());
    }

    // -- compositions and witnesses ----------------------------------------

    #[test]
    fn compositions_frozen_values() {
        assert_eq!(compositions_count(3, 3).unwrap(), BigUint::from(10u32));
        assert_eq!(compositions_count(5, 1).unwrap(), BigUint::from(1u32));
        assert_eq!(compositions_count(0, 4).unwrap(), BigUint::from(1u32));
        assert!(matches!(compositions_count(3, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn compositions_match_enumeration() {
        for total in 0u64..=8 {
            for parts in 1u64..=6 {
                let count = enumerate_compositions(total, parts).len();
                assert_eq!(
                    compositions_count(total, parts).unwrap(),
                    BigUint::from(count),
                    "total={total}, parts={parts}"
                );
            }
        }
    }

    #[test]
    fn compositions_bounded_by_four_to_the_n() {
        // C(2n - 1, n - 1) <= 4^n, the counting step behind the
        // geometric-sum bound.
        for n in 1u64..=12 {
            let c = compositions_count(n, n).unwrap();
            let bound = BigUint::from(4u32).pow(n as u32);
            assert!(c <= bound, "n={n}");
        }
    }

    #[test]
    fn witness_frozen_values() {
        assert_eq!(
            witness_encode(&WitnessSequence::new(vec![2, 0, 1])),
            "001101"
        );
        assert_eq!(witness_encode(&WitnessSequence::new(vec![0])), "1");
        assert_eq!(
            witness_decode("001101").unwrap(),
            WitnessSequence::new(vec![2, 0, 1])
        );
        assert!(witness_decode("00").is_err());
        assert!(witness_decode("1x0").is_err());
        assert_eq!(witness_decode("").unwrap(), WitnessSequence::new(vec![]));
    }

    #[test]
    fn witness_round_trip_is_a_bijection() {
        for total in 0u64..=6 {
            for parts in 1u64..=6 {
                let comps = enumerate_compositions(total, parts);
                let mut seen = std::collections::BTreeSet::new();
                for q in &comps {
                    let w = WitnessSequence::new(q.clone());
                    let bits = witness_encode(&w);
                    assert_eq!(bits.len() as u64, total + parts);
                    assert_eq!(witness_decode(&bits).unwrap(), w);
                    assert!(seen.insert(bits), "duplicate encoding");
                }
                assert_eq!(
                    BigUint::from(seen.len()),
                    compositions_count(total, parts).unwrap()
                );
            }
        }
    }

    // -- geometric sums ----------------------------------------------------

    #[test]
    fn geometric_sum_frozen_values() {
        let p8 = Rational64::new(1, 8);
        // One variable: Pr[Y >= 2] = p^2 = 1/64 (upper endpoint is exact).
        let one_var = geometric_sum_tail(1, p8, 2, 64).unwrap();
        assert_eq!(one_var.upper.exact().unwrap(), &br(1, 64));
        assert!(one_var.lower.exact().unwrap() < one_var.upper.exact().unwrap());

        // Two variables: Pr[sum >= 2] = 11/256,
        // with Pr[sum = 0] = 49/64 and Pr[sum = 1] = 49/256.
        let two_var = geometric_sum_tail(2, p8, 2, 64).unwrap();
        assert_eq!(two_var.upper.exact().unwrap(), &br(11, 256));
        let at_one = geometric_sum_tail(2, p8, 1, 64).unwrap();
        assert_eq!(at_one.upper.exact().unwrap(), &(&BigRational::one() - br(49, 64)));

        // Threshold 0 is certain regardless of the cap.
        let certain = geometric_sum_tail(3, p8, 0, 64).unwrap();
        assert_eq!(certain.lower.log2(), 0.0);
        assert_eq!(certain.upper.log2(), 0.0);
    }

    #[test]
    fn geometric_sum_rejects_bad_inputs() {
        let p8 = Rational64::new(1, 8);
        assert!(matches!(
            geometric_sum_tail(2, p8, 5, 4),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            geometric_sum_tail(2, Rational64::one(), 1, 64),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            geometric_sum_tail(2, Rational64::zero(), 1, 64),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            geometric_sum_tail(0, p8, 1, 64),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn geometric_sum_matches_direct_inclusion_exclusion() {
        // Independent formula: Pr[sum >= t] = 1 - sum over all vectors
        // (y_1..y_n) with sum < t of prod p^{y_i} (1 - p).
        for n in 1u64..=3 {
            for (pn, pd) in [(1i64, 8i64), (1, 16), (2, 5)] {
                let p = Rational64::new(pn, pd);
                let p_big = big_ratio(p);
                let one_minus = BigRational::one() - &p_big;
                for t in 1u64..=5 {
                    let mut below = BigRational::zero();
                    // Vectors with sum s < t are compositions of s into n parts.
                    for s in 0..t {
                        for v in enumerate_compositions(s, n) {
                            let mut prob = BigRational::one();
                            for &y in &v {
                                prob *= big_ratio_pow(&p_big, y as i64) * &one_minus;
                            }
                            below += prob;
                        }
                    }
                    let expect = BigRational::one() - below;
                    let got = geometric_sum_tail(n, p, t, t + 64).unwrap();
                    assert_eq!(
                        got.upper.exact().unwrap(),
                        &expect,
                        "n={n}, p={p}, t={t}"
                    );
                }
            }
        }
    }

    // -- query validation ---------------------------------------------------

    #[test]
    fn tail_query_validation() {
        assert!(TailQuery::new(16, StepLaw::FairUnit, 17).is_err());
        assert!(TailQuery::new(16, StepLaw::FairUnit, -16).is_ok());
        assert!(TailQuery::new(16, StepLaw::Bernoulli(Rational64::new(2, 3)), 4).is_err());
        assert!(TailQuery::new(16, StepLaw::Bernoulli(Rational64::new(1, 3)), -1).is_err());
        let q = TailQuery::new(16, StepLaw::FairUnit, 1).unwrap();
        assert_eq!(q.tail().unwrap().exact().unwrap(), &br(26333, 65536));
    }

    // -- property tests -----------------------------------------------------

    proptest! {
        #[test]
        fn prop_walk_modes_agree(n in 1u64..200, offset in 0u64..200) {
            let t = (offset % (n + 1)) as i64;
            let exact = walk_tail(n, t).unwrap();
            // Recompute in log space through the binomial path.
            let h = walk_heads_threshold(n, t);
            prop_assume!(h > 0);
            let log = binom_tail(n, Rational64::new(1, 2), h as u64, Mode::FloatLog).unwrap();
            prop_assert!((exact.log2() - log.log2()).abs() <= 1e-9);
        }

        #[test]
        fn prop_binom_tail_monotone(n in 1u64..80, num in 1i64..8) {
            let p = Rational64::new(num, 16);
            let mut prev = BigRational::one();
            for t in 0..=n {
                let cur = binom_tail(n, p, t, Mode::ExactRational).unwrap();
                let cur = cur.exact().unwrap().clone();
                prop_assert!(cur <= prev);
                prev = cur;
            }
        }

        #[test]
        fn prop_prefix_max_monotone_in_m(n in 1u64..60) {
            let mut prev = BigRational::one();
            for m in 1..=n {
                let cur = prefix_max_tail(n, m, PrefixMethod::Dp).unwrap();
                let cur = cur.exact().unwrap().clone();
                prop_assert!(cur <= prev);
                prev = cur;
            }
        }

        #[test]
        fn prop_witness_round_trip(q in proptest::collection::vec(0u64..6, 1..8)) {
            let w = WitnessSequence::new(q);
            let bits = witness_encode(&w);
            prop_assert_eq!(witness_decode(&bits).unwrap(), w);
        }
    }
}

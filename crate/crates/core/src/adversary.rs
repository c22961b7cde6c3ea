//! Adaptive variance-budget game: a strategy chooses, step by step, a
//! mean-zero two-point step distribution (watching everything played so
//! far), subject to a total variance budget; a referee samples the steps
//! and enforces the rules.
//!
//! The process under study is the running sum `X_t` and its running
//! maximum `Z_t`. The bound families `bennett-*` in [`crate::bounds`]
//! certify tails of the final sum against *every* admissible strategy;
//! the built-in strategies here exercise the regimes those bounds are
//! tight in, plus a constructive lower-bound strategy.
//!
//! Rules enforced by the referee:
//! - each step distribution takes values `{-a, +b}` with `a, b` in `[0, 1]`,
//!   weighted to have mean zero (variance `a*b`);
//! - the cumulative variance never exceeds the budget (an overspend is a
//!   [`Error::ProtocolViolation`], not a clamp);
//! - in [`BudgetMode::Exactly`] the game must end with the budget spent in
//!   full, whether it ends by stopping or by running out of steps.
//!
//! All game arithmetic is exact (`Rational64`), so replaying a seed
//! reproduces a trajectory bit for bit.

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::{parse_ratio64, ratio64_string};

// ---------------------------------------------------------------------------
// Step distributions
// ---------------------------------------------------------------------------

/// A mean-zero two-point step distribution on `{-neg, +pos}`.
///
/// The zero-mean weighting puts probability `neg/(neg+pos)` on `+pos` and
/// `pos/(neg+pos)` on `-neg`; the variance is `neg * pos`. Both endpoints
/// must lie in `[0, 1]`. `neg = pos = 0` is the point mass at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepDistribution {
    pub neg: Rational64,
    pub pos: Rational64,
}

impl StepDistribution {
    pub fn new(neg: Rational64, pos: Rational64) -> Result<Self> {
        let d = StepDistribution { neg, pos };
        d.validate()?;
        Ok(d)
    }

    /// The fair unit step `{-1, +1}`.
    pub fn unit_fair() -> Self {
        StepDistribution {
            neg: Rational64::one(),
            pos: Rational64::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("neg", self.neg), ("pos", self.pos)] {
            if v < Rational64::zero() || v > Rational64::one() {
                return Err(Error::Domain(format!(
                    "step endpoint {name} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn variance(&self) -> Rational64 {
        self.neg * self.pos
    }

    /// Probability of the positive outcome, `neg/(neg+pos)`; the point
    /// mass at zero reports 0.
    pub fn prob_pos(&self) -> Rational64 {
        let total = self.neg + self.pos;
        if total.is_zero() {
            Rational64::zero()
        } else {
            self.neg / total
        }
    }

    /// Draw one step, exactly: an integer in `[0, den)` is compared with
    /// the numerator of `Pr[+pos]`, so the draw consumes the same number
    /// of RNG words regardless of platform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational64 {
        let p = self.prob_pos();
        if p.is_zero() {
            // Either the point mass at zero or pos-only mass on -neg = 0.
            return if self.pos.is_zero() { -self.neg } else { Rational64::zero() };
        }
        let num = *p.numer() as u64;
        let den = *p.denom() as u64;
        if rng.gen_range(0..den) < num {
            self.pos
        } else {
            -self.neg
        }
    }
}

/// A strategy's decision for the next step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepChoice {
    Play(StepDistribution),
    Stop,
}

// ---------------------------------------------------------------------------
// Game configuration and state view
// ---------------------------------------------------------------------------

/// Whether the budget is a ceiling or must be consumed in full.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetMode {
    AtMost,
    Exactly,
}

impl BudgetMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BudgetMode::AtMost => "at-most",
            BudgetMode::Exactly => "exactly",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "at-most" => Ok(BudgetMode::AtMost),
            "exactly" => Ok(BudgetMode::Exactly),
            other => Err(Error::Lookup(format!(
                "unknown budget mode `{other}` (expected `at-most` or `exactly`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    /// Maximum number of steps the referee will allow.
    pub n: u64,
    /// Total variance budget.
    pub budget: Rational64,
    pub mode: BudgetMode,
    /// Seed used by [`play_trajectory`]; callers that bring their own RNG
    /// (the Monte Carlo layer) ignore it.
    pub seed: u64,
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Range("the game needs at least one step".into()));
        }
        if self.budget < Rational64::zero() {
            return Err(Error::Domain(format!(
                "variance budget {} is negative",
                self.budget
            )));
        }
        Ok(())
    }
}

/// Everything a strategy may condition on before choosing its next step.
#[derive(Debug, Clone, Copy)]
pub struct GameView<'a> {
    /// 0-based index of the step about to be chosen.
    pub index: u64,
    /// Steps still available, counting the one about to be chosen.
    pub steps_remaining: u64,
    /// Realized step values so far.
    pub history: &'a [Rational64],
    /// Running sum `X` after `index` steps.
    pub prefix_sum: Rational64,
    /// Running maximum `Z = max(0, X_1, ..., X_index)`.
    pub max_prefix: Rational64,
    /// Variance spent so far.
    pub spent: Rational64,
    /// Total budget.
    pub budget: Rational64,
}

impl GameView<'_> {
    pub fn budget_remaining(&self) -> Rational64 {
        self.budget - self.spent
    }
}

/// A (pure) strategy: a function of the visible game state. Purity is what
/// makes replays exact; strategies must not carry interior mutability.
pub trait Strategy: Send + Sync {
    /// Stable identifier, parseable by [`strategy_from_id`].
    fn id(&self) -> String;
    fn next(&self, view: &GameView<'_>) -> StepChoice;
}

// ---------------------------------------------------------------------------
// Referee
// ---------------------------------------------------------------------------

/// Summary of one finished game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    /// Final running sum.
    pub final_x: Rational64,
    /// Maximum of the running sums (at least 0, from the empty prefix).
    pub y_max: Rational64,
    /// Total variance consumed.
    pub spent: Rational64,
    pub steps_played: u64,
    /// 0-based index at which the strategy stopped, if it did.
    pub stopped_at: Option<u64>,
}

fn run_game<R: Rng + ?Sized>(
    config: &GameConfig,
    strategy: &dyn Strategy,
    rng: &mut R,
    mut observe: impl FnMut(Rational64, Rational64),
) -> Result<GameOutcome> {
    config.validate()?;
    let mut history: Vec<Rational64> = Vec::with_capacity(config.n.min(4096) as usize);
    let mut prefix = Rational64::zero();
    let mut y_max = Rational64::zero();
    let mut spent = Rational64::zero();
    let mut stopped_at = None;

    for i in 0..config.n {
        let view = GameView {
            index: i,
            steps_remaining: config.n - i,
            history: &history,
            prefix_sum: prefix,
            max_prefix: y_max,
            spent,
            budget: config.budget,
        };
        match strategy.next(&view) {
            StepChoice::Stop => {
                stopped_at = Some(i);
                break;
            }
            StepChoice::Play(dist) => {
                dist.validate().map_err(|e| Error::ProtocolViolation {
                    step: i + 1,
                    reason: e.to_string(),
                })?;
                let var = dist.variance();
                if spent + var > config.budget {
                    return Err(Error::ProtocolViolation {
                        step: i + 1,
                        reason: format!(
                            "variance budget exceeded: {} spent, step needs {}, budget {}",
                            spent, var, config.budget
                        ),
                    });
                }
                let x = dist.sample(rng);
                spent += var;
                prefix += x;
                if prefix > y_max {
                    y_max = prefix;
                }
                history.push(x);
                observe(x, var);
            }
        }
    }

    if config.mode == BudgetMode::Exactly && spent != config.budget {
        return Err(Error::ProtocolViolation {
            step: stopped_at.map(|i| i + 1).unwrap_or(config.n),
            reason: format!(
                "budget must be spent exactly: spent {} of {}",
                spent, config.budget
            ),
        });
    }

    Ok(GameOutcome {
        final_x: prefix,
        y_max,
        spent,
        steps_played: history.len() as u64,
        stopped_at,
    })
}

/// Play one game with a caller-supplied RNG, returning only the summary.
/// This is the hot path for Monte Carlo estimation.
pub fn play_outcome<R: Rng + ?Sized>(
    config: &GameConfig,
    strategy: &dyn Strategy,
    rng: &mut R,
) -> Result<GameOutcome> {
    run_game(config, strategy, rng, |_, _| {})
}

/// Like [`play_outcome`], but invokes `observe(step_value, step_variance)`
/// after each played step, for callers that need per-step statistics
/// without materializing a [`Trajectory`].
pub fn play_observed<R: Rng + ?Sized>(
    config: &GameConfig,
    strategy: &dyn Strategy,
    rng: &mut R,
    observe: impl FnMut(Rational64, Rational64),
) -> Result<GameOutcome> {
    run_game(config, strategy, rng, observe)
}

/// A fully recorded game, replayable from `GameConfig::seed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub n: u64,
    /// Realized step values.
    pub steps: Vec<Rational64>,
    /// Variance consumed by each step.
    pub variances: Vec<Rational64>,
    /// Running sums after each step.
    pub prefix: Vec<Rational64>,
    pub y_max: Rational64,
    pub spent: Rational64,
    pub stopped_at: Option<u64>,
}

impl Trajectory {
    pub fn final_x(&self) -> Rational64 {
        self.prefix.last().copied().unwrap_or_else(Rational64::zero)
    }

    /// CSV rendering with one row per played step. Columns: `step`
    /// (1-based), `x` (running sum after the step), `z` (running maximum
    /// after the step), `v_spent` (variance consumed by this step).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,x,z,v_spent\n");
        let mut z = Rational64::zero();
        for (i, (x, v)) in self.prefix.iter().zip(&self.variances).enumerate() {
            if *x > z {
                z = *x;
            }
            out.push_str(&format!(
                "{},{},{},{}\n",
                i + 1,
                ratio64_string(*x),
                ratio64_string(z),
                ratio64_string(*v)
            ));
        }
        out
    }

    /// First-passage steps of the running maximum over each multiple of
    /// `spacing`; see [`checkpoints`].
    pub fn checkpoints(&self, spacing: Rational64) -> Result<Vec<u64>> {
        checkpoints(&self.prefix, spacing)
    }
}

/// Play one game from `config.seed`, recording the full trajectory.
pub fn play_trajectory(config: &GameConfig, strategy: &dyn Strategy) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut steps = Vec::new();
    let mut variances = Vec::new();
    let mut prefix = Vec::new();
    let mut acc = Rational64::zero();
    let outcome = run_game(config, strategy, &mut rng, |x, v| {
        acc += x;
        steps.push(x);
        variances.push(v);
        prefix.push(acc);
    })?;
    Ok(Trajectory {
        n: config.n,
        steps,
        variances,
        prefix,
        y_max: outcome.y_max,
        spent: outcome.spent,
        stopped_at: outcome.stopped_at,
    })
}

/// For `s = 1, 2, 3, ...`, the 1-based index of the first step whose
/// running sum reaches `s * spacing`, for as many multiples as are reached.
/// The result is strictly increasing; a sum crossing several multiples in
/// one step (possible only with spacing < 1) yields repeated... distinct
/// indices for distinct multiples, recorded at the same step.
pub fn checkpoints(prefix: &[Rational64], spacing: Rational64) -> Result<Vec<u64>> {
    if spacing <= Rational64::zero() {
        return Err(Error::Domain(format!(
            "checkpoint spacing {spacing} must be positive"
        )));
    }
    let mut out = Vec::new();
    let mut next = spacing;
    let mut z = Rational64::zero();
    for (i, x) in prefix.iter().enumerate() {
        if *x > z {
            z = *x;
        }
        while z >= next {
            out.push(i as u64 + 1);
            next += spacing;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Built-in strategies
// ---------------------------------------------------------------------------

/// Fair unit steps until less than one unit of budget remains, then a
/// single fractional step `{-f, +1}` spending the remainder `f`, then stop.
/// Spends the budget exactly whenever enough steps are available.
#[derive(Debug, Clone, Copy)]
pub struct Rademacher;

impl Strategy for Rademacher {
    fn id(&self) -> String {
        "rademacher".into()
    }

    fn next(&self, view: &GameView<'_>) -> StepChoice {
        let rem = view.budget_remaining();
        if rem >= Rational64::one() {
            StepChoice::Play(StepDistribution::unit_fair())
        } else if rem > Rational64::zero() {
            StepChoice::Play(StepDistribution {
                neg: rem,
                pos: Rational64::one(),
            })
        } else {
            StepChoice::Stop
        }
    }
}

/// The constructive lower-bound strategy: `k^2` consecutive groups of
/// `group_size = floor(budget / k^2)` fair unit steps. Each group
/// independently reaches `+group_target` (the smallest integer at least
/// `sqrt(group_size)/4`) with probability at least 1/4, so all groups
/// succeed — and the final sum reaches `k^2 * group_target` — with
/// probability at least `4^(-k^2)`. Budget left over after the groups
/// (`budget - k^2 * group_size`) is not spent.
#[derive(Debug, Clone, Copy)]
pub struct GroupedLower {
    k: u64,
    group_size: u64,
}

impl GroupedLower {
    pub fn new(budget: Rational64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("group parameter k must be positive".into()));
        }
        let groups = k
            .checked_mul(k)
            .ok_or_else(|| Error::Domain(format!("k = {k} overflows k^2")))?;
        let per_group = budget / Rational64::from_integer(groups as i64);
        let group_size = per_group.floor().to_integer();
        if group_size < 1 {
            return Err(Error::Domain(format!(
                "budget {budget} cannot fund {groups} groups of at least one unit step"
            )));
        }
        Ok(GroupedLower {
            k,
            group_size: group_size as u64,
        })
    }

    pub fn groups(&self) -> u64 {
        self.k * self.k
    }

    pub fn group_size(&self) -> u64 {
        self.group_size
    }

    /// Smallest integer `t >= 1` with `t >= sqrt(group_size)/4`, i.e. with
    /// `16 t^2 >= group_size`.
    pub fn group_target(&self) -> u64 {
        let m = self.group_size;
        let mut t = (((m as f64).sqrt()) / 4.0).floor() as u64;
        t = t.max(1);
        while t > 1 && 16 * (t - 1) * (t - 1) >= m {
            t -= 1;
        }
        while 16 * t * t < m {
            t += 1;
        }
        t
    }

    /// Final sum reached when every group succeeds.
    pub fn success_threshold(&self) -> u64 {
        self.groups() * self.group_target()
    }

    fn total_steps(&self) -> u64 {
        self.groups() * self.group_size
    }
}

impl Strategy for GroupedLower {
    fn id(&self) -> String {
        format!("grouped-lower:{}", self.k)
    }

    fn next(&self, view: &GameView<'_>) -> StepChoice {
        if view.index < self.total_steps() {
            StepChoice::Play(StepDistribution::unit_fair())
        } else {
            StepChoice::Stop
        }
    }
}

/// The large-deviation extremal strategy: `budget * r` steps of
/// `{-1/r, +1}` (variance `1/r` each, positive outcome with probability
/// `1/(r+1)`), spending the budget exactly. Requires `r >= 1` and
/// `budget * r` a positive integer.
#[derive(Debug, Clone, Copy)]
pub struct Burst {
    r: Rational64,
    steps: u64,
}

impl Burst {
    pub fn new(budget: Rational64, r: Rational64) -> Result<Self> {
        if r < Rational64::one() {
            return Err(Error::Domain(format!("burst ratio r = {r} must be >= 1")));
        }
        let total = budget * r;
        if !total.is_integer() || total <= Rational64::zero() {
            return Err(Error::Domain(format!(
                "burst needs budget * r to be a positive integer, got {total}"
            )));
        }
        let steps = total
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Capacity(format!("burst step count {total} overflows u64")))?;
        Ok(Burst { r, steps })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step_distribution(&self) -> StepDistribution {
        StepDistribution {
            neg: r_recip(self.r),
            pos: Rational64::one(),
        }
    }
}

fn r_recip(r: Rational64) -> Rational64 {
    Rational64::new(*r.denom(), *r.numer())
}

impl Strategy for Burst {
    fn id(&self) -> String {
        format!("burst:{}", ratio64_string(self.r))
    }

    fn next(&self, view: &GameView<'_>) -> StepChoice {
        if view.index < self.steps {
            StepChoice::Play(self.step_distribution())
        } else {
            StepChoice::Stop
        }
    }
}

/// Optional-stopping wrapper: delegate to `inner` until the running sum
/// reaches `tau`, then stop. Turns a bound on the running maximum of the
/// inner strategy into a bound on the final sum.
pub struct StopAt {
    tau: Rational64,
    inner: Box<dyn Strategy>,
}

impl StopAt {
    pub fn new(tau: Rational64, inner: Box<dyn Strategy>) -> Result<Self> {
        if tau <= Rational64::zero() {
            return Err(Error::Domain(format!(
                "stopping level tau = {tau} must be positive"
            )));
        }
        Ok(StopAt { tau, inner })
    }

    pub fn tau(&self) -> Rational64 {
        self.tau
    }
}

impl Strategy for StopAt {
    fn id(&self) -> String {
        format!("stop:{}:{}", ratio64_string(self.tau), self.inner.id())
    }

    fn next(&self, view: &GameView<'_>) -> StepChoice {
        if view.prefix_sum >= self.tau {
            StepChoice::Stop
        } else {
            self.inner.next(view)
        }
    }
}

/// Build a strategy from its stable identifier:
/// `rademacher`, `grouped-lower:<k>`, `burst:<r>`, or
/// `stop:<tau>:<inner-id>` (nested). `<r>` and `<tau>` accept `a/b`
/// rationals. The budget is needed up front because `grouped-lower` and
/// `burst` derive their step counts from it.
pub fn strategy_from_id(id: &str, budget: Rational64) -> Result<Box<dyn Strategy>> {
    let id = id.trim();
    if id == "rademacher" {
        return Ok(Box::new(Rademacher));
    }
    if let Some(rest) = id.strip_prefix("grouped-lower:") {
        let k: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad group parameter `{rest}`")))?;
        return Ok(Box::new(GroupedLower::new(budget, k)?));
    }
    if let Some(rest) = id.strip_prefix("burst:") {
        let r = parse_ratio64(rest)?;
        return Ok(Box::new(Burst::new(budget, r)?));
    }
    if let Some(rest) = id.strip_prefix("stop:") {
        let (tau_s, inner_s) = rest.split_once(':').ok_or_else(|| {
            Error::Lookup("stop strategy needs the form stop:<tau>:<inner-id>".into())
        })?;
        let tau = parse_ratio64(tau_s)?;
        let inner = strategy_from_id(inner_s, budget)?;
        return Ok(Box::new(StopAt::new(tau, inner)?));
    }
    Err(Error::Lookup(format!(
        "unknown strategy `{id}` (expected rademacher, grouped-lower:<k>, \
         burst:<r>, or stop:<tau>:<inner>)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, TestCaseError};

    fn cfg(n: u64, budget: Rational64, mode: BudgetMode, seed: u64) -> GameConfig {
        GameConfig {
            n,
            budget,
            mode,
            seed,
        }
    }

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn step_distribution_moments() {
        let d = StepDistribution::new(rat(1, 8), rat(1, 1)).unwrap();
        assert_eq!(d.variance(), rat(1, 8));
        assert_eq!(d.prob_pos(), rat(1, 9));

        let fair = StepDistribution::unit_fair();
        assert_eq!(fair.variance(), rat(1, 1));
        assert_eq!(fair.prob_pos(), rat(1, 2));

        // Mean is zero by construction: pos*P[pos] - neg*P[neg] = 0.
        let mean = d.pos * d.prob_pos() - d.neg * (Rational64::one() - d.prob_pos());
        assert!(mean.is_zero());

        assert!(StepDistribution::new(rat(3, 2), rat(1, 2)).is_err());
        assert!(StepDistribution::new(rat(-1, 2), rat(1, 2)).is_err());
    }

    #[test]
    fn sample_hits_only_the_two_endpoints() {
        let d = StepDistribution::new(rat(1, 4), rat(1, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut saw_pos = false;
        let mut saw_neg = false;
        for _ in 0..200 {
            let x = d.sample(&mut rng);
            if x == rat(1, 1) {
                saw_pos = true;
            } else if x == rat(-1, 4) {
                saw_neg = true;
            } else {
                panic!("unexpected sample {x}");
            }
        }
        assert!(saw_pos && saw_neg);
    }

    #[test]
    fn rademacher_spends_integer_budget_and_stops() {
        let config = cfg(64, rat(16, 1), BudgetMode::AtMost, 3);
        let t = play_trajectory(&config, &Rademacher).unwrap();
        assert_eq!(t.steps.len(), 16);
        assert_eq!(t.stopped_at, Some(16));
        assert_eq!(t.spent, rat(16, 1));
        assert!(t.steps.iter().all(|s| s.abs() == Rational64::one()));
        // Prefix sums are consistent with the steps.
        let mut acc = Rational64::zero();
        for (s, p) in t.steps.iter().zip(&t.prefix) {
            acc += *s;
            assert_eq!(acc, *p);
        }
        assert_eq!(t.final_x(), acc);
        assert!(t.y_max >= Rational64::zero() && t.y_max >= acc.max(Rational64::zero()));
    }

    #[test]
    fn rademacher_spends_fractional_budget_exactly() {
        let config = cfg(64, rat(3, 2), BudgetMode::Exactly, 11);
        let t = play_trajectory(&config, &Rademacher).unwrap();
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.variances, vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(t.spent, rat(3, 2));
        // The fractional step is {-1/2, +1}.
        assert!(t.steps[1] == rat(1, 1) || t.steps[1] == rat(-1, 2));
    }

    struct Constant(StepDistribution);

    impl Strategy for Constant {
        fn id(&self) -> String {
            "constant".into()
        }
        fn next(&self, _: &GameView<'_>) -> StepChoice {
            StepChoice::Play(self.0)
        }
    }

    #[test]
    fn overspend_is_a_protocol_violation_at_the_offending_step() {
        // Variance 1/8 per step under budget 1: steps 1..=8 are fine, the
        // ninth attempt must be refused.
        let s = Constant(StepDistribution::new(rat(1, 8), rat(1, 1)).unwrap());
        let config = cfg(64, rat(1, 1), BudgetMode::AtMost, 0);
        let err = play_trajectory(&config, &s).unwrap_err();
        match err {
            Error::ProtocolViolation { step, .. } => assert_eq!(step, 9),
            other => panic!("expected a protocol violation, got {other:?}"),
        }
    }

    struct Quitter;

    impl Strategy for Quitter {
        fn id(&self) -> String {
            "quitter".into()
        }
        fn next(&self, _: &GameView<'_>) -> StepChoice {
            StepChoice::Stop
        }
    }

    #[test]
    fn exact_mode_rejects_underspending() {
        let config = cfg(8, rat(1, 1), BudgetMode::Exactly, 0);
        assert!(matches!(
            play_trajectory(&config, &Quitter),
            Err(Error::ProtocolViolation { step: 1, .. })
        ));
        // The same stop under an at-most budget is fine.
        let relaxed = cfg(8, rat(1, 1), BudgetMode::AtMost, 0);
        let t = play_trajectory(&relaxed, &Quitter).unwrap();
        assert_eq!(t.steps.len(), 0);
        assert_eq!(t.final_x(), Rational64::zero());
    }

    #[test]
    fn replay_is_deterministic() {
        let config = cfg(64, rat(64, 1), BudgetMode::AtMost, 42);
        let a = play_trajectory(&config, &Rademacher).unwrap();
        let b = play_trajectory(&config, &Rademacher).unwrap();
        assert_eq!(a, b);

        let other = play_trajectory(&cfg(64, rat(64, 1), BudgetMode::AtMost, 43), &Rademacher)
            .unwrap();
        assert_ne!(a.steps, other.steps);
    }

    #[test]
    fn grouped_lower_shape_matches_the_construction() {
        let g = GroupedLower::new(rat(64, 1), 2).unwrap();
        assert_eq!(g.groups(), 4);
        assert_eq!(g.group_size(), 16);
        assert_eq!(g.group_target(), 1);
        assert_eq!(g.success_threshold(), 4);

        let t = play_trajectory(&cfg(128, rat(64, 1), BudgetMode::AtMost, 5), &g).unwrap();
        assert_eq!(t.steps.len(), 64);
        assert_eq!(t.spent, rat(64, 1));
        assert!(t.steps.iter().all(|s| s.abs() == Rational64::one()));

        // Budget 65 leaves a remainder unspent: the groups stay 4 x 16.
        let g2 = GroupedLower::new(rat(65, 1), 2).unwrap();
        assert_eq!(g2.group_size(), 16);
        let t2 = play_trajectory(&cfg(128, rat(65, 1), BudgetMode::AtMost, 5), &g2).unwrap();
        assert_eq!(t2.spent, rat(64, 1));

        // Unfundable configurations are rejected up front.
        assert!(GroupedLower::new(rat(3, 1), 2).is_err());
        assert!(GroupedLower::new(rat(64, 1), 0).is_err());
    }

    #[test]
    fn group_target_is_the_least_quarter_root() {
        for (size, want) in [(1, 1), (16, 1), (17, 2), (64, 2), (65, 3), (144, 3), (145, 4)] {
            let g = GroupedLower {
                k: 1,
                group_size: size,
            };
            assert_eq!(g.group_target(), want, "size {size}");
        }
    }

    #[test]
    fn burst_plays_budget_times_r_scaled_steps() {
        let b = Burst::new(rat(8, 1), rat(8, 1)).unwrap();
        assert_eq!(b.steps(), 64);
        let d = b.step_distribution();
        assert_eq!(d.neg, rat(1, 8));
        assert_eq!(d.pos, rat(1, 1));
        assert_eq!(d.variance(), rat(1, 8));
        assert_eq!(d.prob_pos(), rat(1, 9));

        let t = play_trajectory(&cfg(128, rat(8, 1), BudgetMode::Exactly, 1), &b).unwrap();
        assert_eq!(t.steps.len(), 64);
        assert_eq!(t.spent, rat(8, 1));

        // budget * r must be a positive integer.
        assert!(Burst::new(rat(1, 2), rat(3, 1)).is_err());
        assert!(Burst::new(rat(8, 1), rat(1, 2)).is_err());
        // Fractional r with integral budget * r is allowed.
        let half = Burst::new(rat(2, 1), rat(3, 2)).unwrap();
        assert_eq!(half.steps(), 3);
        assert_eq!(half.step_distribution().neg, rat(2, 3));
    }

    #[test]
    fn stop_strategy_freezes_the_sum_at_tau() {
        let inner: Box<dyn Strategy> = Box::new(Rademacher);
        let s = StopAt::new(rat(2, 1), inner).unwrap();
        for seed in 0..20 {
            let t = play_trajectory(&cfg(64, rat(64, 1), BudgetMode::AtMost, seed), &s).unwrap();
            if t.stopped_at.is_some() && t.steps.len() < 64 {
                // Stopped because the level was hit: the sum sits exactly
                // at tau (unit steps cannot jump past an integer level).
                assert_eq!(t.final_x(), rat(2, 1));
                assert_eq!(t.y_max, rat(2, 1));
            } else {
                assert!(t.final_x() < rat(2, 1));
                assert!(t.y_max < rat(2, 1));
            }
        }
    }

    #[test]
    fn checkpoint_ladder_on_a_monotone_walk() {
        let prefix: Vec<Rational64> = (1..=10).map(|i| rat(i, 1)).collect();
        assert_eq!(
            checkpoints(&prefix, rat(2, 1)).unwrap(),
            vec![2, 4, 6, 8, 10]
        );
        // The max is what matters: dipping back down does not un-cross.
        let wiggly: Vec<Rational64> =
            [1, 2, 1, 0, 3, 2].iter().map(|&i| rat(i, 1)).collect();
        assert_eq!(checkpoints(&wiggly, rat(1, 1)).unwrap(), vec![1, 2, 5]);
        // A jump over several multiples records them all at that step.
        assert_eq!(checkpoints(&[rat(3, 1)], rat(1, 1)).unwrap(), vec![1, 1, 1]);
        assert!(checkpoints(&prefix, rat(0, 1)).is_err());
    }

    #[test]
    fn strategy_ids_round_trip() {
        let budget = rat(64, 1);
        for id in [
            "rademacher",
            "grouped-lower:2",
            "burst:8",
            "burst:3/2",
            "stop:2:rademacher",
            "stop:3/2:burst:8",
        ] {
            let s = strategy_from_id(id, budget).unwrap();
            assert_eq!(s.id(), id, "id should round-trip");
        }
        assert!(strategy_from_id("no-such", budget).is_err());
        assert!(strategy_from_id("grouped-lower:0", budget).is_err());
        assert!(strategy_from_id("stop:2", budget).is_err());
    }

    #[test]
    fn trajectory_csv_is_stable() {
        let config = cfg(8, rat(4, 1), BudgetMode::AtMost, 9);
        let t = play_trajectory(&config, &Rademacher).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,x,z,v_spent"));
        assert_eq!(csv.lines().count(), 1 + t.steps.len());
        // Replaying produces the identical dump.
        assert_eq!(csv, play_trajectory(&config, &Rademacher).unwrap().to_csv());
    }

    proptest! {
        // The referee never lets a constant-variance strategy finish
        // having overspent: the game succeeds exactly when n steps of
        // variance 1/den fit in the budget.
        #[test]
        fn referee_enforces_the_budget(den in 1i64..8, n in 1u64..40, budget_num in 0i64..12) {
            let budget = Rational64::new(budget_num, 2);
            let s = Constant(StepDistribution::new(Rational64::new(1, den), Rational64::one()).unwrap());
            let config = cfg(n, budget, BudgetMode::AtMost, 0);
            let fits = Rational64::new(n as i64, den) <= budget;
            match play_trajectory(&config, &s) {
                Ok(t) => {
                    prop_assert!(fits);
                    prop_assert!(t.spent <= budget);
                    prop_assert_eq!(t.steps.len() as u64, n);
                }
                Err(Error::ProtocolViolation { step, .. }) => {
                    prop_assert!(!fits);
                    // The violation happens at the first step that no
                    // longer fits.
                    let fitting = (budget * Rational64::from_integer(den)).floor().to_integer() as u64;
                    prop_assert_eq!(step, fitting + 1);
                }
                Err(other) => return Err(TestCaseError::fail(format!("unexpected error {other:?}"))),
            }
        }
    }
}

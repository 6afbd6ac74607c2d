//! Two-regime decay envelopes and their exact composition rules.
//!
//! An envelope bounds a kernel X(r) by r^{β−n} (or a log / α-power variant)
//! when √α r ≤ 1 and by α^p r^ρ e^{−rate·√α r} beyond, vanishing past the
//! support radius. Exponents are exact rationals so that the comparison of
//! β+γ against n never suffers from floating ties.

use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = Rational64;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

fn qi(v: i64) -> Q {
    Q::from_integer(v)
}

pub(crate) fn qf(v: Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Near-regime shape of an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearRegime {
    /// r^{β−n}
    Power,
    /// 1 + |log(√α r)|
    Log,
    /// α^e, a bounded near regime with an α-dependent level.
    ConstAlpha(Q),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpec {
    pub beta: Q,
    pub p: Q,
    pub rho: Q,
    pub rate: Q,
    /// `None` means unbounded support.
    pub support: Option<f64>,
    pub near: NearRegime,
}

/// Outcome of the compatibility predicate 2p − ρ ≤ n − β.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatReport {
    pub holds: bool,
    #[serde(serialize_with = "ser_q")]
    pub lhs: Q,
    #[serde(serialize_with = "ser_q")]
    pub rhs: Q,
    /// rhs − lhs; negative when the predicate fails.
    #[serde(serialize_with = "ser_q")]
    pub slack: Q,
}

impl EnvelopeSpec {
    /// A power-near envelope with rate 1 and unbounded support.
    pub fn power(beta: Q, p: Q, rho: Q) -> Self {
        EnvelopeSpec { beta, p, rho, rate: qi(1), support: None, near: NearRegime::Power }
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support = Some(radius);
        self
    }

    pub fn with_rate(mut self, rate: Q) -> Self {
        self.rate = rate;
        self
    }

    /// Envelope of the Euclidean kernel G_α^{(k)} from its two-regime bound.
    pub fn green(n: u32, k: u32) -> Self {
        let (n, k) = (n as i64, k as i64);
        EnvelopeSpec::power(qi(2 * k), q(k * (n - 3), 4), q((k - 2) * n + k, 2))
    }

    /// Envelope of the parametrix error field l_{α,x}.
    pub fn error_field(n: u32, k: u32, tau0: f64) -> Self {
        let (n, k) = (n as i64, k as i64);
        EnvelopeSpec::power(qi(2), q(k * (n + 1), 4), q((k - 2) * n + k + 4, 2)).with_support(tau0)
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        let nq = qi(n as i64);
        if self.beta <= Q::zero() || self.beta > nq {
            return Err(Error::Domain(format!("beta = {} must lie in (0, {n}]", self.beta)));
        }
        if self.rho <= -nq {
            return Err(Error::Domain(format!("rho = {} must exceed −{n}", self.rho)));
        }
        if self.rate <= Q::zero() {
            return Err(Error::Domain(format!("rate = {} must be positive", self.rate)));
        }
        if let Some(s) = self.support {
            if !(s > 0.0) {
                return Err(Error::Domain(format!("support radius {s} must be positive")));
            }
        }
        if let NearRegime::ConstAlpha(_) = self.near {
            if self.beta != nq {
                return Err(Error::Domain("a constant near regime requires beta = n".into()));
            }
        }
        Ok(())
    }

    /// Near-regime level as a power of α when the near regime is bounded.
    fn near_alpha_power(&self) -> Q {
        match self.near {
            NearRegime::ConstAlpha(e) => e,
            _ => Q::zero(),
        }
    }

    /// Constant-free bound value at distance r.
    pub fn eval(&self, alpha: f64, r: f64, n: u32) -> f64 {
        if let Some(s) = self.support {
            if r > s {
                return 0.0;
            }
        }
        let sa = alpha.sqrt();
        let t = sa * r;
        if t <= 1.0 {
            match self.near {
                NearRegime::Power => r.powf(qf(self.beta) - n as f64),
                NearRegime::Log => 1.0 + t.ln().abs(),
                NearRegime::ConstAlpha(e) => alpha.powf(qf(e)),
            }
        } else {
            alpha.powf(qf(self.p)) * r.powf(qf(self.rho)) * (-qf(self.rate) * t).exp()
        }
    }
}

/// Checks 2p − ρ ≤ n − β. A bounded α^e near regime is first normalised to
/// level 1, which shifts p to p − e and sets β = n.
pub fn compatibility_check(x: &EnvelopeSpec, n: u32) -> CompatReport {
    let e = x.near_alpha_power();
    let lhs = qi(2) * (x.p - e) - x.rho;
    let rhs = qi(n as i64) - x.beta;
    CompatReport { holds: lhs <= rhs, lhs, rhs, slack: rhs - lhs }
}

fn sum_support(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    }
}

fn near_of_sum(sum: Q, n: Q) -> (Q, NearRegime) {
    if sum < n {
        (sum, NearRegime::Power)
    } else if sum == n {
        (n, NearRegime::Log)
    } else {
        (n, NearRegime::ConstAlpha(-(sum - n) / qi(2)))
    }
}

fn admissible(x: &EnvelopeSpec, n: u32, which: &str) -> Result<()> {
    x.validate(n).map_err(|e| Error::Domain(format!("{which}: {e}")))?;
    if x.near == NearRegime::Log {
        return Err(Error::NotApplicable(format!(
            "{which} has a logarithmic near regime; the composition rule needs a power or bounded near bound"
        )));
    }
    Ok(())
}

/// Exponential Giraud rule at α = 1.
pub fn compose_euclid(x: &EnvelopeSpec, y: &EnvelopeSpec, n: u32) -> Result<EnvelopeSpec> {
    admissible(x, n, "X")?;
    admissible(y, n, "Y")?;
    let nq = qi(n as i64);
    let (beta, near) = near_of_sum(x.beta + y.beta, nq);
    let near = match near {
        NearRegime::ConstAlpha(_) => NearRegime::ConstAlpha(Q::zero()),
        other => other,
    };
    Ok(EnvelopeSpec {
        beta,
        p: Q::zero(),
        rho: x.rho + y.rho + nq,
        rate: x.rate.min(y.rate),
        support: sum_support(x.support, y.support),
        near,
    })
}

/// α-scaled Giraud rule. Both inputs must satisfy the compatibility predicate.
pub fn compose_alpha(x: &EnvelopeSpec, y: &EnvelopeSpec, n: u32) -> Result<EnvelopeSpec> {
    admissible(x, n, "X")?;
    admissible(y, n, "Y")?;
    for (name, e) in [("X", x), ("Y", y)] {
        let c = compatibility_check(e, n);
        if !c.holds {
            return Err(Error::NotApplicable(format!(
                "{name} violates 2p − ρ ≤ n − β: {} > {} (slack {})",
                c.lhs, c.rhs, c.slack
            )));
        }
    }
    // Bounded inputs are composed at level 1 and rescaled afterwards.
    let shift = x.near_alpha_power() + y.near_alpha_power();
    let nq = qi(n as i64);
    let sum = x.beta + y.beta;
    let (beta, near) = near_of_sum(sum, nq);
    let near = match near {
        NearRegime::ConstAlpha(e) => NearRegime::ConstAlpha(e + shift),
        NearRegime::Power if shift != Q::zero() => {
            return Err(Error::NotApplicable(
                "bounded input composed into a singular output".into(),
            ))
        }
        other => other,
    };
    let p = nq - sum / qi(2) + (x.rho + y.rho) / qi(2) + shift;
    Ok(EnvelopeSpec {
        beta,
        p,
        rho: x.rho + y.rho + nq,
        rate: x.rate.min(y.rate),
        support: sum_support(x.support, y.support),
        near,
    })
}

/// Envelopes of Γ^(1), …, Γ^(depth) obtained by iterating [`compose_alpha`]
/// on the error-field envelope.
pub fn iterate_error_envelopes(n: u32, k: u32, tau0: f64, depth: usize) -> Result<Vec<EnvelopeSpec>> {
    let l = EnvelopeSpec::error_field(n, k, tau0);
    let mut out = vec![l.clone()];
    for _ in 1..depth {
        let next = compose_alpha(out.last().unwrap(), &l, n)?;
        out.push(next);
    }
    Ok(out)
}

/// The α-power and far r-power of Γ^(i) as printed in the parametrix
/// construction: (ki(n+1)/4, (k(n+1)+4)i/2 − n).
pub fn printed_iterate_exponents(n: u32, k: u32, i: u32) -> (Q, Q) {
    let (n, k, i) = (n as i64, k as i64, i as i64);
    (q(k * i * (n + 1), 4), q((k * (n + 1) + 4) * i, 2) - qi(n))
}

/// N = ⌊n/2⌋ + 1, the depth at which the iterates become bounded.
pub fn iteration_depth(n: u32) -> usize {
    (n / 2 + 1) as usize
}

/// Three-regime comparison function with an α-power prefactor:
/// α^a · { e^{−(1−ε)} ; e^{−(1−ε)√α d} ; e^{−(1−ε)√α i_g/2} }.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiEnvelope {
    pub alpha_power: Q,
    pub epsilon: f64,
    pub injectivity_radius: f64,
}

impl PsiEnvelope {
    pub fn new(epsilon: f64, injectivity_radius: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(injectivity_radius > 0.0) {
            return Err(Error::Domain("injectivity radius must be positive".into()));
        }
        Ok(PsiEnvelope { alpha_power: Q::zero(), epsilon, injectivity_radius })
    }

    /// The bare shape Ψ_{ε,α}(d), without the α prefactor.
    pub fn shape(&self, alpha: f64, d: f64) -> f64 {
        psi(self.epsilon, alpha, d, self.injectivity_radius)
    }

    pub fn eval(&self, alpha: f64, d: f64) -> f64 {
        alpha.powf(qf(self.alpha_power)) * self.shape(alpha, d)
    }
}

/// Ψ_{ε,α}(d) with saturation at d ≥ i_g/2.
pub fn psi(epsilon: f64, alpha: f64, d: f64, injectivity_radius: f64) -> f64 {
    let sa = alpha.sqrt();
    let c = 1.0 - epsilon;
    if d >= injectivity_radius / 2.0 {
        (-c * sa * injectivity_radius / 2.0).exp()
    } else if sa * d <= 1.0 {
        (-c).exp()
    } else {
        (-c * sa * d).exp()
    }
}

/// Composition of a bounded kernel with a Ψ envelope: X ⋆ (α^a Ψ) ≤ C α^{a+e−n/2} Ψ,
/// where α^e is the near level of X.
pub fn compose_psi_with(x: &EnvelopeSpec, y: &PsiEnvelope, n: u32) -> Result<PsiEnvelope> {
    x.validate(n)?;
    let nq = qi(n as i64);
    let e = match x.near {
        NearRegime::ConstAlpha(e) => e,
        NearRegime::Power if x.beta == nq => Q::zero(),
        _ => {
            return Err(Error::NotApplicable(
                "the Ψ composition needs a bounded near regime (β = n)".into(),
            ))
        }
    };
    let lhs = qi(2) * (x.p - e) - x.rho;
    if lhs.is_positive() {
        return Err(Error::NotApplicable(format!("2p − ρ = {lhs} > 0 after normalisation")));
    }
    Ok(PsiEnvelope { alpha_power: y.alpha_power + e - nq / qi(2), ..y.clone() })
}

/// [`compose_psi_with`] against the bare Ψ_{ε,α} for the given ε and i_g.
pub fn compose_psi(x: &EnvelopeSpec, epsilon: f64, n: u32, injectivity_radius: f64) -> Result<PsiEnvelope> {
    compose_psi_with(x, &PsiEnvelope::new(epsilon, injectivity_radius)?, n)
}

// ---- JSON form -------------------------------------------------------------

fn ser_q<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_integer() {
        s.serialize_i64(*v.numer())
    } else {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

pub(crate) fn parse_q(text: &str) -> std::result::Result<Q, String> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let b: i64 = b.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if b == 0 {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(q(a, b));
    }
    if let Ok(i) = t.parse::<i64>() {
        return Ok(qi(i));
    }
    let f: f64 = t.parse().map_err(|_| format!("not a rational: {t:?}"))?;
    float_to_q(f)
}

fn float_to_q(f: f64) -> std::result::Result<Q, String> {
    Q::approximate_float(f).ok_or_else(|| format!("cannot represent {f} as a rational"))
}

fn de_q<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
    let r = match QRepr::deserialize(d)? {
        QRepr::Int(i) => Ok(qi(i)),
        QRepr::Float(f) => float_to_q(f),
        QRepr::Text(s) => parse_q(&s),
    };
    r.map_err(serde::de::Error::custom)
}

fn de_q_opt<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
    let v: Option<QRepr> = Option::deserialize(d)?;
    match v {
        None => Ok(None),
        Some(QRepr::Int(i)) => Ok(Some(qi(i))),
        Some(QRepr::Float(f)) => float_to_q(f).map(Some).map_err(serde::de::Error::custom),
        Some(QRepr::Text(s)) => parse_q(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

fn one() -> Q {
    qi(1)
}

#[derive(Serialize, Deserialize)]
struct EnvelopeJson {
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    beta: Q,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    p: Q,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    rho: Q,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q", default = "one")]
    rate: Q,
    #[serde(default)]
    support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    near: Option<String>,
    #[serde(
        default,
        deserialize_with = "de_q_opt",
        serialize_with = "ser_q_opt",
        skip_serializing_if = "Option::is_none"
    )]
    near_alpha: Option<Q>,
}

fn ser_q_opt<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_q(v, s),
        None => s.serialize_none(),
    }
}

impl Serialize for EnvelopeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (near, near_alpha) = match self.near {
            NearRegime::Power => (None, None),
            NearRegime::Log => (Some("log".to_string()), None),
            NearRegime::ConstAlpha(e) => (Some("const".to_string()), Some(e)),
        };
        EnvelopeJson {
            beta: self.beta,
            p: self.p,
            rho: self.rho,
            rate: self.rate,
            support: self.support,
            near,
            near_alpha,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EnvelopeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = EnvelopeJson::deserialize(d)?;
        let near = match j.near.as_deref() {
            None | Some("power") => NearRegime::Power,
            Some("log") => NearRegime::Log,
            Some("const") => NearRegime::ConstAlpha(j.near_alpha.unwrap_or_else(Q::zero)),
            Some(other) => {
                return Err(serde::de::Error::custom(format!("unknown near regime {other:?}")))
            }
        };
        Ok(EnvelopeSpec { beta: j.beta, p: j.p, rho: j.rho, rate: j.rate, support: j.support, near })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn euclid_examples() {
        let x = EnvelopeSpec::power(qi(2), qi(0), qi(-1));
        let z = compose_euclid(&x, &x, 5).unwrap();
        assert_eq!(z.near, NearRegime::Power);
        assert_eq!(z.beta - qi(5), qi(-1));
        assert_eq!(z.rho, qi(3));
        let b = EnvelopeSpec::power(qi(3), qi(0), qi(0));
        let z = compose_euclid(&b, &b, 3).unwrap();
        assert!(matches!(z.near, NearRegime::ConstAlpha(_)));
        let y = EnvelopeSpec::power(qi(3), qi(0), qi(0));
        assert_eq!(compose_euclid(&x, &y, 5).unwrap().near, NearRegime::Log);
    }

    #[test]
    fn alpha_examples() {
        let l = EnvelopeSpec::error_field(3, 1, 0.1);
        assert_eq!((l.beta, l.p, l.rho), (qi(2), qi(1), qi(1)));
        let z = compose_alpha(&l, &l, 3).unwrap();
        assert_eq!(z.near, NearRegime::ConstAlpha(q(-1, 2)));
        assert_eq!(z.p, qi(2));
        assert_eq!(z.rho, qi(5));
        assert_eq!(z.support, Some(0.2));

        let b = EnvelopeSpec::power(qi(3), qi(0), qi(0));
        let z = compose_alpha(&b, &b, 3).unwrap();
        assert_eq!(z.near, NearRegime::ConstAlpha(q(-3, 2)));

        let a = EnvelopeSpec::power(qi(2), qi(0), qi(0)).with_support(0.25);
        let c = EnvelopeSpec::power(qi(2), qi(0), qi(0)).with_support(0.5);
        assert_eq!(compose_alpha(&a, &c, 5).unwrap().support, Some(0.75));
    }

    #[test]
    fn compatibility_examples() {
        let l = EnvelopeSpec::error_field(3, 1, 0.1);
        let c = compatibility_check(&l, 3);
        assert!(c.holds);
        assert_eq!(c.slack, qi(0));
        let b = EnvelopeSpec::power(qi(3), qi(0), qi(0));
        assert!(compatibility_check(&b, 3).holds);
        let bad = EnvelopeSpec::power(qi(2), qi(3), qi(0));
        let c = compatibility_check(&bad, 3);
        assert!(!c.holds);
        assert_eq!(c.slack, qi(-5));
        let err = compose_alpha(&bad, &l, 3).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    #[test]
    fn iterates_match_printed_exponents() {
        for n in [3u32, 5, 7] {
            for k in [1u32, 2] {
                if n <= 2 * k {
                    continue;
                }
                let depth = iteration_depth(n);
                let envs = iterate_error_envelopes(n, k, 0.05, depth).unwrap();
                for (i, e) in envs.iter().enumerate() {
                    let (pa, pr) = printed_iterate_exponents(n, k, i as u32 + 1);
                    assert_eq!(e.p, pa, "n={n} k={k} i={}", i + 1);
                    assert_eq!(e.rho, pr, "n={n} k={k} i={}", i + 1);
                    assert_eq!(compatibility_check(e, n).slack, qi(0));
                }
                let last = envs.last().unwrap();
                assert!(matches!(last.near, NearRegime::ConstAlpha(_)));
            }
        }
    }

    #[test]
    fn gamma_normalisation_matches_remainder_bound() {
        // α^{−N+n/2} near level and far (√α d)^{p_{n,k}} after normalisation.
        for (n, k) in [(3u32, 1u32), (5, 1), (5, 2), (7, 2)] {
            let big_n = iteration_depth(n) as i64;
            let envs = iterate_error_envelopes(n, k, 0.05, big_n as usize).unwrap();
            let g = envs.last().unwrap();
            let (ni, ki) = (n as i64, k as i64);
            assert_eq!(g.near, NearRegime::ConstAlpha(qi(-big_n) + q(ni, 2)));
            let pnk = q((ki * (ni + 1) + 4) * big_n, 2) - qi(ni);
            assert_eq!(g.rho, pnk);
            assert_eq!(g.p - (qi(-big_n) + q(ni, 2)), pnk / qi(2));
        }
    }

    #[test]
    fn psi_rules() {
        let b = EnvelopeSpec::power(qi(3), qi(0), qi(0));
        let p1 = compose_psi(&b, 0.5, 3, 0.5).unwrap();
        assert_eq!(p1.alpha_power, q(-3, 2));
        let p2 = compose_psi_with(&b, &p1, 3).unwrap();
        assert_eq!(p2.alpha_power - p1.alpha_power, q(-3, 2));
        assert_eq!(p2.alpha_power, qi(-3));

        let envs = iterate_error_envelopes(3, 1, 0.05, 2).unwrap();
        let g = compose_psi(&envs[1], 0.1, 3, 0.5).unwrap();
        // γ near level α^{−1/2} times α^{−n/2}
        assert_eq!(g.alpha_power, q(-1, 2) + q(-3, 2));

        let singular = EnvelopeSpec::power(qi(2), qi(0), qi(0));
        assert!(compose_psi(&singular, 0.1, 3, 0.5).is_err());
        let growing = EnvelopeSpec::power(qi(3), qi(1), qi(0));
        assert!(compose_psi(&growing, 0.1, 3, 0.5).is_err());
    }

    #[test]
    fn psi_shape_is_continuous() {
        let (eps, a, ig): (f64, f64, f64) = (0.1, 400.0, 0.5);
        let d1 = 1.0 / a.sqrt();
        assert!((psi(eps, a, d1 * (1.0 - 1e-12), ig) - psi(eps, a, d1 * (1.0 + 1e-12), ig)).abs() < 1e-10);
        let d2 = ig / 2.0;
        assert!((psi(eps, a, d2 * (1.0 - 1e-12), ig) - psi(eps, a, d2, ig)).abs() < 1e-10);
    }

    #[test]
    fn log_input_not_applicable() {
        let x = EnvelopeSpec { near: NearRegime::Log, ..EnvelopeSpec::power(qi(5), qi(0), qi(0)) };
        assert!(matches!(compose_alpha(&x, &x, 5), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn json_round_trip() {
        let envs = iterate_error_envelopes(3, 1, 0.05, 2).unwrap();
        for e in envs {
            let s = serde_json::to_string(&e).unwrap();
            let back: EnvelopeSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(back, e);
        }
        let e: EnvelopeSpec =
            serde_json::from_str(r#"{"beta": 2, "p": "1/2", "rho": -1.5, "rate": 0.9, "support": 0.3}"#)
                .unwrap();
        assert_eq!(e.p, q(1, 2));
        assert_eq!(e.rho, q(-3, 2));
        assert_eq!(e.rate, q(9, 10));
        assert_eq!(e.support, Some(0.3));
    }

    fn arb_q(lo: i64, hi: i64) -> impl Strategy<Value = Q> {
        (lo..hi, 1i64..5).prop_map(|(a, b)| q(a, b))
    }

    proptest! {
        #[test]
        fn near_exponent_associative(b1 in arb_q(1, 10), b2 in arb_q(1, 10), b3 in arb_q(1, 10), n in 4u32..12) {
            let nq = qi(n as i64);
            prop_assume!(b1 <= nq && b2 <= nq && b3 <= nq);
            prop_assume!(b1 + b2 + b3 < nq);
            let e = |b| EnvelopeSpec::power(b, qi(0), qi(0));
            let left = compose_euclid(&compose_euclid(&e(b1), &e(b2), n).unwrap(), &e(b3), n).unwrap();
            let right = compose_euclid(&e(b1), &compose_euclid(&e(b2), &e(b3), n).unwrap(), n).unwrap();
            prop_assert_eq!(left.beta, right.beta);
            prop_assert_eq!(left.beta - nq, b1 + b2 + b3 - nq);
        }

        #[test]
        fn support_additive(s1 in 0.01f64..1.0, s2 in 0.01f64..1.0) {
            let a = EnvelopeSpec::power(qi(2), qi(0), qi(0)).with_support(s1);
            let b = EnvelopeSpec::power(qi(2), qi(0), qi(0)).with_support(s2);
            prop_assert_eq!(compose_alpha(&a, &b, 5).unwrap().support, Some(s1 + s2));
        }

        #[test]
        fn far_power_grows_by_n(rho in arb_q(-10, 10), nu in arb_q(-10, 10), n in 3u32..10) {
            let nq = qi(n as i64);
            prop_assume!(rho > -nq && nu > -nq);
            let z = compose_euclid(
                &EnvelopeSpec::power(qi(1), qi(0), rho),
                &EnvelopeSpec::power(qi(1), qi(0), nu),
                n,
            ).unwrap();
            prop_assert!(z.rho >= rho.max(nu) + (nq + rho.min(nu)));
            prop_assert!(z.rho > rho.max(nu));
        }

        #[test]
        fn composed_output_stays_compatible(b1 in arb_q(1, 7), b2 in arb_q(1, 7), r1 in arb_q(-2, 8), r2 in arb_q(-2, 8)) {
            let n = 7u32;
            let nq = qi(7);
            prop_assume!(b1 <= nq && b2 <= nq && b1 + b2 < nq);
            // saturate the predicate: p = (n − β + ρ)/2
            let x = EnvelopeSpec::power(b1, (nq - b1 + r1) / qi(2), r1);
            let y = EnvelopeSpec::power(b2, (nq - b2 + r2) / qi(2), r2);
            prop_assume!(x.p >= qi(0) && y.p >= qi(0));
            let z = compose_alpha(&x, &y, n).unwrap();
            prop_assert_eq!(compatibility_check(&z, n).slack, qi(0));
        }
    }
}

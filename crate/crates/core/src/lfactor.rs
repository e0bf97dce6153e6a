//! Local characters, eigenvalue translations, local L-factors and the
//! constants entering the L^2-norm of the theta lift.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::interval::exp_2pi_i;
use crate::exact::rational::{format_rational, int, pow_signed, rat, to_f64};
use crate::exact::{ComplexInterval, CycloNum, Interval, Rational};
use crate::fqm::{gauss_sum, jacobi_character, milgram_signature, p_primary_decomposition, Fqm};
use crate::json::{rational_str, CycloJson};

/// Largest working precision tried before giving up on an enclosure.
pub const MAX_PRECISION_BITS: u32 = 1024;

/// `A_p` and `|A_p^perp| = |A| / |A_p|`.
fn p_part(a: &Fqm, p: u64) -> (Option<Fqm>, u64) {
    let parts = p_primary_decomposition(a);
    match parts.get(&p) {
        Some(ap) => (Some(ap.clone()), a.order() / ap.order()),
        None => (None, a.order()),
    }
}

fn check_prime(p: u64) -> Result<()> {
    if crate::nt::is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// `chi_{A_p^perp}(n) = (n / |A_p^perp|)`.
pub fn chi_perp(a: &Fqm, p: u64, n: i64) -> Result<i8> {
    let (_, perp) = p_part(a, p);
    jacobi_character(perp as i64, n)
}

/// `chi_{F,p}(m(p,p))`: `|A_p| e(-sig(A_p)/4) chi(p)` for `p | |A|`, and
/// `chi(p)` otherwise.
pub fn chi_f_at_pp(a: &Fqm, p: u64) -> Result<CycloNum> {
    check_prime(p)?;
    let (ap, _) = p_part(a, p);
    let chi = chi_perp(a, p, p as i64)? as i64;
    match ap {
        None => Ok(CycloNum::from_integer(chi)),
        Some(ap) => {
            let sig = milgram_signature(&ap)? as i64;
            let phase = CycloNum::root_of_unity(&rat(-sig, 4));
            Ok(phase.scale_int(ap.order() as i64 * chi))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NonzeroCertified,
    ZeroCertified,
    Borderline,
}

/// Decimal endpoints of an interval, rounded outward.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalInterval {
    pub lo: String,
    pub hi: String,
}

const DECIMAL_DIGITS: u32 = 30;

fn decimal(q: &Rational, round_up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), DECIMAL_DIGITS as usize);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = if round_up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let width = DECIMAL_DIGITS as usize + 1;
    let padded = format!("{digits:0>width$}");
    let (int_part, frac_part) = padded.split_at(padded.len() - DECIMAL_DIGITS as usize);
    format!("{}{int_part}.{frac_part}", if neg { "-" } else { "" })
}

impl DecimalInterval {
    pub fn from_interval(x: &Interval) -> Self {
        Self { lo: decimal(&x.lower(), false), hi: decimal(&x.upper(), true) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexEnclosure {
    pub re: DecimalInterval,
    pub im: DecimalInterval,
}

impl ComplexEnclosure {
    pub fn from_interval(z: &ComplexInterval) -> Self {
        Self { re: DecimalInterval::from_interval(&z.re), im: DecimalInterval::from_interval(&z.im) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub ramified: bool,
    pub chi_f: CycloJson,
    /// `m/2 + 3l - 5`.
    pub exponent: i64,
    pub term: CycloJson,
    pub enclosure: ComplexEnclosure,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingReport {
    pub m: i64,
    pub l: i64,
    /// Whether `m/2 > l + 3`, the range in which nonvanishing is asserted.
    pub in_theorem_range: bool,
    pub primes: Vec<PrimeRecord>,
}

impl NonvanishingReport {
    pub fn all_nonzero(&self) -> bool {
        self.primes.iter().all(|r| r.verdict == Verdict::NonzeroCertified)
    }
}

/// The exact term `1 + chi_{F,p}(m(p,p)) p^{m/2+3l-5}` and its enclosure.
pub fn nonvanishing_term(a: &Fqm, m: i64, l: i64, p: u64, precision_bits: u32) -> Result<(CycloNum, ComplexInterval, Verdict)> {
    if m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("m = {m} must be even")));
    }
    let chi = chi_f_at_pp(a, p)?;
    let e = m / 2 + 3 * l - 5;
    let term = &CycloNum::one() + &chi.scale(&pow_signed(p as i64, e));
    if term.is_zero() {
        let z = term.embed_complex(precision_bits);
        return Ok((term, z, Verdict::ZeroCertified));
    }
    let mut prec = precision_bits.max(53);
    loop {
        let z = term.embed_complex(prec);
        if z.excludes_zero() {
            return Ok((term, z, Verdict::NonzeroCertified));
        }
        if prec >= MAX_PRECISION_BITS {
            return Ok((term, z, Verdict::Borderline));
        }
        prec *= 2;
    }
}

pub fn nonvanishing_report(a: &Fqm, m: i64, l: i64, primes: &[u64], precision_bits: u32) -> Result<NonvanishingReport> {
    let mut records = Vec::new();
    for &p in primes {
        let (term, z, verdict) = nonvanishing_term(a, m, l, p, precision_bits)?;
        records.push(PrimeRecord {
            p,
            ramified: a.order() % p == 0,
            chi_f: CycloJson::from(&chi_f_at_pp(a, p)?),
            exponent: m / 2 + 3 * l - 5,
            term: CycloJson::from(&term),
            enclosure: ComplexEnclosure::from_interval(&z),
            verdict,
        });
    }
    Ok(NonvanishingReport { m, l, in_theorem_range: 2 * (l + 3) < m, primes: records })
}

fn check_dominant(k: i64, l: i64) -> Result<()> {
    if 0 <= k && k <= l && (k + l) % 2 == 0 {
        Ok(())
    } else {
        Err(Error::NotDominant { k, l })
    }
}

/// `lambda_{F,p}(T_{k,l})` from the classical eigenvalue
/// `lambda_f(m(p^{l-k}, 1))`.
pub fn eigenvalue_translate(a: &Fqm, p: u64, k: i64, l: i64, kappa: i64, lambda_classical: &CycloNum) -> Result<CycloNum> {
    check_prime(p)?;
    check_dominant(k, l)?;
    // (k - l) is even, so the exponent (k - l)(kappa/2 - 1) is an integer
    let e = (k - l) / 2 * (kappa - 2);
    let power = CycloNum::from_rational(&pow_signed(p as i64, e));
    let (ap, _) = p_part(a, p);
    let factor = match ap {
        None => power,
        Some(ap) => {
            let pk = p.pow(k as u32) as i64;
            let g_ratio = &gauss_sum(&ap, pk)
                * &gauss_sum(&ap, 1).inv().ok_or(Error::GaussSumModulus)?;
            let chi = chi_perp(a, p, pk)? as i64;
            (&power * &g_ratio).scale_int(chi)
        }
    };
    Ok(&factor * lambda_classical)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum LocalFactor {
    Exact {
        #[serde(with = "rational_str")]
        value: Rational,
    },
    Numeric {
        value: f64,
    },
}

impl LocalFactor {
    pub fn to_f64(&self) -> f64 {
        match self {
            LocalFactor::Exact { value } => to_f64(value),
            LocalFactor::Numeric { value } => *value,
        }
    }
}

/// `L_p(s, chi) = (1 - chi(p) p^{-s})^{-1}`; exact for integral `s`.
pub fn dirichlet_local_factor(p: u64, s: &Rational, chi_value: i8) -> Result<LocalFactor> {
    check_prime(p)?;
    if !matches!(chi_value, -1..=1) {
        return Err(Error::InvalidArgument(format!("character value {chi_value} is not in {{-1, 0, 1}}")));
    }
    if s.is_integer() {
        let e = s.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("exponent out of range".into()))?;
        let denom = Rational::one() - pow_signed(p as i64, -e) * int(chi_value as i64);
        if denom.is_zero() {
            return Err(Error::Pole);
        }
        return Ok(LocalFactor::Exact { value: denom.recip() });
    }
    let denom = 1.0 - chi_value as f64 * (p as f64).powf(-to_f64(s));
    if denom == 0.0 {
        return Err(Error::Pole);
    }
    Ok(LocalFactor::Numeric { value: 1.0 / denom })
}

fn local_factor_interval(p: u64, s: i64, chi: i8, prec: u32) -> Result<ComplexInterval> {
    match dirichlet_local_factor(p, &int(s), chi)? {
        LocalFactor::Exact { value } => Ok(ComplexInterval::from_rational(&value, prec)),
        LocalFactor::Numeric { .. } => unreachable!("integral s gives an exact factor"),
    }
}

/// `e(sig/8) / sqrt(n)` as an enclosure.
fn normalized_phase(sig: u8, n: u64, prec: u32) -> ComplexInterval {
    exp_2pi_i(&rat(sig as i64, 8), prec).scale(&Interval::sqrt_rational(&rat(1, n as i64), prec))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalConstant {
    pub p: u64,
    pub denominator: ComplexEnclosure,
    pub factor: ComplexEnclosure,
    #[serde(skip)]
    pub value: Option<ComplexInterval>,
}

/// `K(A_p, m, l) = ((e(sig(A_p)/8)/|A_p|^{1/2} - 1) + L_p(m/2-l+2, chi))^{-1}`,
/// equal to 1 when `p` does not divide `|A|`.
pub fn k_ap_factor(a: &Fqm, p: u64, m: i64, l: i64, precision_bits: u32) -> Result<LocalConstant> {
    check_prime(p)?;
    if m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("m = {m} must be even")));
    }
    if m <= 2 * (l - 1) {
        return Err(Error::InvalidArgument(format!("need m/2 > l - 1, got m = {m}, l = {l}")));
    }
    let (ap, _) = p_part(a, p);
    let Some(ap) = ap else {
        let one = ComplexInterval::from_rational(&Rational::one(), precision_bits);
        return Ok(LocalConstant {
            p,
            denominator: ComplexEnclosure::from_interval(&one),
            factor: ComplexEnclosure::from_interval(&one),
            value: Some(one),
        });
    };
    let sig = milgram_signature(&ap)?;
    let chi = chi_perp(a, p, p as i64)?;
    let s = m / 2 - l + 2;
    let mut prec = precision_bits.max(53);
    loop {
        let one = ComplexInterval::from_rational(&Rational::one(), prec);
        let den = normalized_phase(sig, ap.order(), prec).sub(&one).add(&local_factor_interval(p, s, chi, prec)?);
        if let Some(f) = den.recip() {
            return Ok(LocalConstant {
                p,
                denominator: ComplexEnclosure::from_interval(&den),
                factor: ComplexEnclosure::from_interval(&f),
                value: Some(f),
            });
        }
        if prec >= MAX_PRECISION_BITS {
            return Err(Error::Inconclusive(prec));
        }
        prec *= 2;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArchimedeanConstant {
    /// `(-1)^{s+kappa/2} 2^{3-2s-kappa} / (kappa+s-1)`.
    #[serde(with = "rational_str")]
    pub rational_part: Rational,
    /// `sig(A) mod 8`, the phase is `e(sig/8)`.
    pub sig_mod8: u8,
    /// `|A|`, entering as `|A|^{-1/2}`.
    pub order: u64,
    pub enclosure: ComplexEnclosure,
    #[serde(skip)]
    pub value: Option<ComplexInterval>,
}

/// `K(kappa, s) = e(sig(A)/8)/|A|^{1/2} (-1)^{s+kappa/2} 2^{2-2s-kappa+1}
/// Gamma(kappa+s-1)/Gamma(kappa+s)`.
pub fn k_archimedean(kappa: i64, s: &Rational, a: &Fqm, precision_bits: u32) -> Result<ArchimedeanConstant> {
    if kappa % 2 != 0 {
        return Err(Error::InvalidArgument(format!("kappa = {kappa} must be even")));
    }
    let sign_exp = s + int(kappa / 2);
    if !sign_exp.is_integer() {
        return Err(Error::InvalidArgument(format!("s + kappa/2 = {} is not an integer", format_rational(&sign_exp))));
    }
    // s is an integer from here on
    let s = s.to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("s out of range".into()))?;
    let gamma_arg = kappa + s - 1;
    if gamma_arg <= 0 {
        return Err(Error::Pole);
    }
    let sign = if (s + kappa / 2).is_even() { 1 } else { -1 };
    let rational_part = pow_signed(2, 3 - 2 * s - kappa) * rat(sign, gamma_arg);
    let sig = milgram_signature(a)?;
    let prec = precision_bits.max(53);
    let value = normalized_phase(sig, a.order(), prec).scale_rational(&rational_part);
    Ok(ArchimedeanConstant {
        rational_part,
        sig_mod8: sig,
        order: a.order(),
        enclosure: ComplexEnclosure::from_interval(&value),
        value: Some(value),
    })
}

/// The global character `chi_A`, which is injectable; the default is
/// `n -> (n / |A|)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChiA {
    Jacobi,
    /// Values on `0..modulus`, extended periodically.
    Table { modulus: u64, values: Vec<i8> },
}

impl ChiA {
    /// Parses `jacobi` or `table:v0,v1,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "jacobi" {
            return Ok(ChiA::Jacobi);
        }
        let Some(rest) = text.strip_prefix("table:") else {
            return Err(Error::Parse(format!("unknown character {text:?}")));
        };
        let values: Vec<i8> = rest
            .split(',')
            .map(|v| v.trim().parse::<i8>().map_err(|_| Error::Parse(format!("bad character value {v:?}"))))
            .collect::<Result<_>>()?;
        if values.is_empty() || values.iter().any(|v| !matches!(v, -1..=1)) {
            return Err(Error::Parse("character values must be -1, 0 or 1".into()));
        }
        Ok(ChiA::Table { modulus: values.len() as u64, values })
    }

    pub fn value(&self, a: &Fqm, n: u64) -> Result<i8> {
        match self {
            ChiA::Jacobi => jacobi_character(a.order() as i64, n as i64),
            ChiA::Table { modulus, values } => Ok(values[(n % modulus) as usize]),
        }
    }
}

/// Terms summed for `L(s, chi_A)`; the remainder is bounded by
/// `N^{1-s}/(s-1)`.
const DIRICHLET_TERMS: u64 = 2000;

/// Enclosure of `L(s, chi)` for integral `s >= 2`.
pub fn dirichlet_l_value(a: &Fqm, chi: &ChiA, s: i64, prec: u32) -> Result<Interval> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("L(s, chi_A) is only summed for s >= 2, got {s}")));
    }
    let mut acc = Interval::zero(prec);
    for n in 1..=DIRICHLET_TERMS {
        let c = chi.value(a, n)?;
        if c != 0 {
            acc = acc.add(&Interval::from_rational(&(pow_signed(n as i64, -s) * int(c as i64)), prec));
        }
    }
    let tail = pow_signed(DIRICHLET_TERMS as i64, 1 - s) * rat(1, s - 1);
    Ok(acc.widen(&tail))
}

#[derive(Clone, Debug)]
pub struct AssemblyInputs {
    pub m: i64,
    pub l: i64,
    /// `C(s_0)`.
    pub c_s0: Option<Complex64>,
    /// `L(-m/4 - 3l/2 + 3, f)`.
    pub l_value: Option<Complex64>,
    /// `vol(X_K, mu)`.
    pub vol: Option<f64>,
    /// `L(m/2 - l + 2, chi_A)`; summed from `chi_a` when absent.
    pub l_chi_a: Option<Complex64>,
    pub chi_a: ChiA,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorRecord {
    pub name: String,
    pub supplied: bool,
    pub value: ComplexEnclosure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblyReport {
    /// `||Lambda(f)||^2 / ||f||^2`.
    pub value: ComplexEnclosure,
    pub factors: Vec<FactorRecord>,
    #[serde(skip)]
    pub enclosure: Option<ComplexInterval>,
}

fn supplied(z: Complex64, prec: u32) -> ComplexInterval {
    ComplexInterval::new(Interval::from_f64_radius(z.re, 0.0, prec), Interval::from_f64_radius(z.im, 0.0, prec))
}

/// `vol * C(s_0) K(kappa, -l/2) L(m/2-l+2, chi_A)^{-1} prod_p K(A_p, m, l)
/// L(-m/4-3l/2+3, f)` with `kappa = m/2 + l`.
pub fn l2_norm_assembly(a: &Fqm, inputs: &AssemblyInputs) -> Result<AssemblyReport> {
    let prec = inputs.precision_bits.max(53);
    let c_s0 = inputs.c_s0.ok_or(Error::MissingInput("C(s_0)"))?;
    let l_value = inputs.l_value.ok_or(Error::MissingInput("L-value of f"))?;
    let vol = inputs.vol.ok_or(Error::MissingInput("vol(X_K, mu)"))?;
    if !(vol > 0.0) {
        return Err(Error::InvalidArgument("vol must be positive".into()));
    }
    let (m, l) = (inputs.m, inputs.l);
    if m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("m = {m} must be even")));
    }
    let kappa = m / 2 + l;
    let mut factors = Vec::new();
    let mut record = |name: String, supplied: bool, z: &ComplexInterval| {
        factors.push(FactorRecord { name, supplied, value: ComplexEnclosure::from_interval(z) });
        z.clone()
    };

    let mut acc = record("vol".into(), true, &supplied(Complex64::new(vol, 0.0), prec));
    acc = acc.mul(&record("C(s_0)".into(), true, &supplied(c_s0, prec)));
    let k_inf = k_archimedean(kappa, &rat(-l, 2), a, prec)?;
    acc = acc.mul(&record(format!("K({kappa},{})", format_rational(&rat(-l, 2))), false, k_inf.value.as_ref().unwrap()));
    let s = m / 2 - l + 2;
    let l_chi = match inputs.l_chi_a {
        Some(z) => record(format!("L({s},chi_A)"), true, &supplied(z, prec)),
        None => {
            let v = ComplexInterval::from_real(dirichlet_l_value(a, &inputs.chi_a, s, prec)?);
            record(format!("L({s},chi_A)"), false, &v)
        }
    };
    acc = acc.mul(&l_chi.recip().ok_or(Error::Inconclusive(prec))?);
    for p in a.primes() {
        let kp = k_ap_factor(a, p, m, l, prec)?;
        acc = acc.mul(&record(format!("K(A_{p},{m},{l})"), false, kp.value.as_ref().unwrap()));
    }
    acc = acc.mul(&record("L(f)".into(), true, &supplied(l_value, prec)));
    Ok(AssemblyReport { value: ComplexEnclosure::from_interval(&acc), factors, enclosure: Some(acc) })
}

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use fqm_core::borcherds::{
    check_converse, check_reflective_principal_part, singular_weight_data, symmetrize, ConverseReport, Integrality,
    PrincipalPart, ReflectiveVerdict, SingularWeight,
};
use fqm_core::exact::rational::{parse_rational, rat};
use fqm_core::exact::{Interval, Rational};
use fqm_core::fqm::{
    classify_anisotropic, gauss_sum, index_set, is_anisotropic, milgram_signature, p_primary_decomposition,
    JordanComponent,
};
use fqm_core::json::CycloJson;
use fqm_core::lattice::{find_hyperbolic_split, lattice_profile, DiscriminantForm, HyperbolicSplit, LatticeJson, LatticeProfile};
use fqm_core::lfactor::{
    k_ap_factor, l2_norm_assembly, nonvanishing_report, AssemblyInputs, AssemblyReport, ChiA, ComplexEnclosure,
    LocalConstant, NonvanishingReport,
};
use fqm_core::theta::{theta_coefficients, theta_coefficients_split, verify_theta_modularity};
use fqm_core::weil::{build_weil_matrices, rho_of_gamma, verify_relations, RelationReport};
use fqm_core::{nt, Error, Fqm, GramMatrix};
use num_complex::Complex64;
use serde::Serialize;

use crate::{Cli, Command};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Json(_) | Error::InvalidGram(_) => 64,
            Error::DegenerateLattice => 65,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 64, message: message.into() }
}

pub struct Output {
    pub text: String,
    pub verdict_failed: bool,
}

fn json<T: Serialize>(value: &T, verdict_failed: bool) -> Result<Output, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    Ok(Output { text, verdict_failed })
}

pub fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
    } else {
        s = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn read_lattice(path: &Path) -> Result<GramMatrix, Failure> {
    let raw: LatticeJson = serde_json::from_str(&read_text(path)?).map_err(Error::from)?;
    Ok(GramMatrix::new(raw.gram)?)
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| usage(format!("not a number: {x:?}")));
    match parts[..] {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(usage(format!("expected `re` or `re,im`, got {s:?}"))),
    }
}

fn parse_vectors(s: &str) -> Result<Vec<Vec<Rational>>, Failure> {
    s.split(';')
        .map(|v| v.split(',').map(|x| parse_rational(x).map_err(Failure::from)).collect())
        .collect()
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let prec = cli.precision_bits;
    match &cli.command {
        Command::Analyze { input, max_weil_order } => analyze(&read_lattice(&input.input)?, *max_weil_order),
        Command::Weil { input, gamma } => weil(&read_lattice(&input.input)?, gamma.as_deref()),
        Command::Gauss { input, d } => gauss(&read_lattice(&input.input)?, *d, prec),
        Command::Theta { input, n_max, tau, split, bound, csv } => {
            theta(&read_lattice(&input.input)?, n_max.as_deref(), tau, split.as_deref(), *bound, *csv, prec)
        }
        Command::CheckConverse { input, bound } => converse(&read_lattice(&input.input)?, *bound),
        Command::Reflective { input, principal_part, relaxed_integrality, symmetrize } => {
            reflective(&read_lattice(&input.input)?, principal_part, *relaxed_integrality, *symmetrize)
        }
        Command::Lfactor { input, m, l, primes, c_s0, l_value, vol, l_chi_a, chi_a } => {
            let g = read_lattice(&input.input)?;
            let primes = primes.clone().unwrap_or_else(|| nt::primes_up_to(50));
            let assembly = if c_s0.is_some() || l_value.is_some() || vol.is_some() {
                Some(AssemblyInputs {
                    m: *m,
                    l: *l,
                    c_s0: c_s0.as_deref().map(parse_complex).transpose()?,
                    l_value: l_value.as_deref().map(parse_complex).transpose()?,
                    vol: *vol,
                    l_chi_a: l_chi_a.as_deref().map(parse_complex).transpose()?,
                    chi_a: ChiA::parse(chi_a)?,
                    precision_bits: prec,
                })
            } else {
                None
            };
            lfactor(&g, *m, *l, &primes, assembly, prec)
        }
        Command::Scan { max_order, signatures, csv } => scan(*max_order, signatures, *csv),
    }
}

#[derive(Serialize)]
struct FqmSummary {
    order: u64,
    level: u64,
    divisors: Vec<u64>,
    /// `Q` on the generators, as rationals mod 1.
    q_generators: Vec<String>,
}

fn summary(a: &Fqm) -> FqmSummary {
    FqmSummary {
        order: a.order(),
        level: a.level(),
        divisors: a.divisors().to_vec(),
        q_generators: a.q_generators().iter().map(fqm_core::exact::rational::format_rational).collect(),
    }
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum Classification {
    Classified { components: Vec<JordanComponent> },
    NotAnisotropic,
    Unsupported,
}

#[derive(Serialize)]
struct AnalysisBundle {
    profile: LatticeProfile,
    discriminant: FqmSummary,
    anisotropic: bool,
    classification: BTreeMap<u64, Classification>,
    milgram_signature: u8,
    weil_relations: Option<RelationReport>,
    converse: ConverseReport,
}

fn analyze(g: &GramMatrix, max_weil_order: u64) -> Result<Output, Failure> {
    let profile = lattice_profile(g)?;
    let a = DiscriminantForm::new(g)?.fqm;
    if a.order() != profile.disc_order {
        return Err(Failure { code: 1, message: "discriminant order disagrees with |det|".into() });
    }
    let mut classification = BTreeMap::new();
    for (p, ap) in p_primary_decomposition(&a) {
        let c = match classify_anisotropic(&ap) {
            Ok(components) => Classification::Classified { components },
            Err(Error::NotAnisotropic) => Classification::NotAnisotropic,
            Err(Error::UnsupportedClassification) => Classification::Unsupported,
            Err(e) => return Err(e.into()),
        };
        classification.insert(p, c);
    }
    let sig = milgram_signature(&a)?;
    let weil_relations = if a.order() <= max_weil_order {
        Some(verify_relations(&build_weil_matrices(&a, profile.sig)?))
    } else {
        None
    };
    let bundle = AnalysisBundle {
        anisotropic: is_anisotropic(&a)?,
        discriminant: summary(&a),
        classification,
        milgram_signature: sig,
        weil_relations,
        converse: check_converse(g)?,
        profile,
    };
    json(&bundle, false)
}

fn weil(g: &GramMatrix, gamma: Option<&[i64]>) -> Result<Output, Failure> {
    let profile = lattice_profile(g)?;
    let a = DiscriminantForm::new(g)?.fqm;
    let w = build_weil_matrices(&a, profile.sig)?;
    let export = w.export();
    let failed = !export.relations.all_pass();
    let mut value = serde_json::to_value(&export).map_err(Error::from)?;
    if let Some(c) = gamma {
        if c.len() != 4 {
            return Err(usage("--gamma takes four entries a,b,c,d"));
        }
        let m = rho_of_gamma(&w, [[c[0], c[1]], [c[2], c[3]]])?;
        value["rho_gamma"] = serde_json::to_value(m.to_json()).map_err(Error::from)?;
    }
    json(&value, failed)
}

#[derive(Serialize)]
struct GaussReport {
    d: i64,
    order: u64,
    gauss_sum: CycloJson,
    milgram_signature: u8,
    /// `g(A) / sqrt|A|`, which is `e(sig/8)` for `d = 1`.
    normalized: ComplexEnclosure,
}

fn gauss(g: &GramMatrix, d: i64, prec: u32) -> Result<Output, Failure> {
    let a = DiscriminantForm::new(g)?.fqm;
    let gs = gauss_sum(&a, d);
    let z = gs.embed_complex(prec);
    let normalized = z.scale(&Interval::sqrt_rational(&rat(1, a.order() as i64), z.precision()));
    json(
        &GaussReport {
            d,
            order: a.order(),
            gauss_sum: CycloJson::from(&gs),
            milgram_signature: milgram_signature(&a)?,
            normalized: ComplexEnclosure::from_interval(&normalized),
        },
        false,
    )
}

fn theta(
    g: &GramMatrix,
    n_max: Option<&str>,
    tau: &[String],
    split: Option<&str>,
    bound: Option<u32>,
    csv: bool,
    prec: u32,
) -> Result<Output, Failure> {
    let n_max = n_max.map(parse_rational).transpose()?;
    if !g.is_positive_definite() {
        let split = split.ok_or_else(|| usage("non-definite lattices need --split and --bound"))?;
        let bound = bound.ok_or_else(|| usage("non-definite lattices need --bound"))?;
        let n = n_max.ok_or_else(|| usage("--n-max is required"))?;
        let block = theta_coefficients_split(g, &parse_vectors(split)?, &n, bound)?;
        return json(&block, false);
    }
    if tau.is_empty() {
        let n = n_max.ok_or_else(|| usage("--n-max is required without --tau"))?;
        let block = theta_coefficients(g, &n)?;
        if csv {
            return Ok(Output { text: block.to_csv(), verdict_failed: false });
        }
        return json(&block, false);
    }
    let samples: Vec<Complex64> = tau.iter().map(|t| parse_complex(t)).collect::<Result<_, _>>()?;
    let report = verify_theta_modularity(g, &samples, prec, n_max.as_ref())?;
    let block = theta_coefficients(g, &report.n_max)?;
    if csv {
        return Ok(Output { text: block.to_csv(), verdict_failed: false });
    }
    json(&serde_json::json!({ "coefficients": block, "modularity": report }), false)
}

#[derive(Serialize)]
struct ConverseOutput {
    report: ConverseReport,
    split_search_bound: u32,
    /// A verified witness `L = K + U`, when the bounded search finds one.
    split: Option<HyperbolicSplit>,
}

fn converse(g: &GramMatrix, bound: u32) -> Result<Output, Failure> {
    let report = check_converse(g)?;
    let split = if bound > 0 { find_hyperbolic_split(g, bound)? } else { None };
    let failed = !report.pass;
    json(&ConverseOutput { report, split_search_bound: bound, split }, failed)
}

#[derive(Serialize)]
struct ReflectiveOutput {
    mode: Integrality,
    symmetrized: bool,
    principal_part: PrincipalPart,
    verdict: ReflectiveVerdict,
}

fn reflective(g: &GramMatrix, pp_path: &Path, relaxed: bool, sym: bool) -> Result<Output, Failure> {
    let a = DiscriminantForm::new(g)?.fqm;
    let pp: PrincipalPart = serde_json::from_str(&read_text(pp_path)?).map_err(Error::from)?;
    let pp = if sym { symmetrize(&a, &pp)? } else { pp };
    let mode = if relaxed { Integrality::Relaxed } else { Integrality::Strict };
    let verdict = check_reflective_principal_part(&a, &pp, mode)?;
    let failed = !verdict.pass;
    json(&ReflectiveOutput { mode, symmetrized: sym, principal_part: pp, verdict }, failed)
}

#[derive(Serialize)]
struct LfactorOutput {
    nonvanishing: NonvanishingReport,
    local_constants: Vec<LocalConstant>,
    assembly: Option<AssemblyReport>,
}

fn lfactor(g: &GramMatrix, m: i64, l: i64, primes: &[u64], assembly: Option<AssemblyInputs>, prec: u32) -> Result<Output, Failure> {
    let a = DiscriminantForm::new(g)?.fqm;
    let nonvanishing = nonvanishing_report(&a, m, l, primes, prec)?;
    let mut local_constants = Vec::new();
    if m > 2 * (l - 1) {
        for p in a.primes() {
            local_constants.push(k_ap_factor(&a, p, m, l, prec)?);
        }
    }
    let assembly = assembly.map(|inputs| l2_norm_assembly(&a, &inputs)).transpose()?;
    let failed = !nonvanishing.all_nonzero();
    json(&LfactorOutput { nonvanishing, local_constants, assembly }, failed)
}

pub const SCAN_MAX_ORDER: u64 = 10_000;

#[derive(Serialize)]
struct ScanRow {
    label: String,
    order: u64,
    milgram_signature: u8,
    signature: Option<i64>,
    /// `p` for type `(p, 2)` with `p - 2 = signature`.
    p: Option<i64>,
    singular_weight: Option<SingularWeight>,
    /// `|A_{c,1/c}|` for each divisor `c > 1` of the level.
    index_sets: BTreeMap<u64, usize>,
}

/// Every anisotropic module of odd square-free order `n`: one `A_p^t` per
/// prime, with `t` a square or a non-square.
fn squarefree_modules(n: u64) -> Result<Vec<(String, Fqm)>, Failure> {
    let mut out = vec![(String::new(), Fqm::trivial())];
    for p in nt::prime_divisors(n) {
        let mut next = Vec::new();
        for (label, a) in &out {
            for t in [1, nt::smallest_nonresidue(p)] {
                let piece = Fqm::cyclic(p, t as i64)?;
                let label = if label.is_empty() { format!("A_{p}^{t}") } else { format!("{label}+A_{p}^{t}") };
                next.push((label, a.direct_sum(&piece)));
            }
        }
        out = next;
    }
    for (label, _) in out.iter_mut() {
        if label.is_empty() {
            *label = "trivial".into();
        }
    }
    Ok(out)
}

fn scan(max_order: u64, signatures: &[i64], csv: bool) -> Result<Output, Failure> {
    if max_order > SCAN_MAX_ORDER {
        return Err(usage(format!("max order {max_order} exceeds {SCAN_MAX_ORDER}")));
    }
    let mut rows = Vec::new();
    for n in (1..=max_order).filter(|n| n % 2 == 1 && nt::is_squarefree(*n)) {
        for (label, a) in squarefree_modules(n)? {
            let sig = milgram_signature(&a)?;
            let mut index_sets = BTreeMap::new();
            for c in (2..=a.level()).filter(|c| a.level() % c == 0) {
                index_sets.insert(c, index_set(&a, c, &rat(1, c as i64))?.len());
            }
            let matching: Vec<Option<i64>> = if signatures.is_empty() {
                vec![None]
            } else {
                signatures.iter().filter(|s| s.rem_euclid(8) == sig as i64).map(|s| Some(*s)).collect()
            };
            for s in matching {
                let p = s.map(|s| s + 2);
                let singular_weight = p.filter(|&p| p >= 3).map(singular_weight_data).transpose()?;
                rows.push(ScanRow {
                    label: label.clone(),
                    order: a.order(),
                    milgram_signature: sig,
                    signature: s,
                    p,
                    singular_weight,
                    index_sets: index_sets.clone(),
                });
            }
        }
    }
    if csv {
        let mut text = String::from("label,order,milgram_signature,signature,p,weight,c00,index_sets\n");
        for r in &rows {
            let opt = |x: Option<String>| x.unwrap_or_default();
            let sets: Vec<String> = r.index_sets.iter().map(|(c, k)| format!("{c}:{k}")).collect();
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.label,
                r.order,
                r.milgram_signature,
                opt(r.signature.map(|s| s.to_string())),
                opt(r.p.map(|p| p.to_string())),
                opt(r.singular_weight.as_ref().map(|w| fqm_core::exact::rational::format_rational(&w.weight))),
                opt(r.singular_weight.as_ref().map(|w| w.c00.to_string())),
                sets.join(" "),
            ));
        }
        return Ok(Output { text, verdict_failed: false });
    }
    json(&rows, false)
}

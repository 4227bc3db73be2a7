//! The pairwise invariant battery. The tool only ever proves
//! non-equivalence; agreement on every invariant is reported as inconclusive.

use serde::Serialize;

use crate::carpet::{Carpet, CarpetProfile, Certification, SigmaClass};
use crate::real::{decimal_digits, DEFAULT_PRECISION_BITS};
use crate::spectrum::{dim_intervals, log_form_sign, spectra_equal, SpectrumError, SpectrumVerdict};
use crate::rational::ExactRational;

/// Certified class membership of a single carpet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassFlags {
    /// `𝓜_t`: totally disconnected.
    pub m_t: Certification,
    /// `𝓜_{t,v}`: additionally has a vacant row.
    pub m_tv: Certification,
    /// `𝓜_{t,v,d}`: additionally doubling.
    pub m_tvd: Certification,
    pub has_vacant_row: bool,
    pub doubling: bool,
    pub regular: bool,
}

pub fn class_membership(profile: &CarpetProfile) -> ClassFlags {
    let m_t = profile.total_disconnectedness();
    let m_tv = match (m_t, profile.has_vacant_row()) {
        (_, false) | (Certification::No, _) => Certification::No,
        (Certification::Yes, true) => Certification::Yes,
        (Certification::Unknown, true) => Certification::Unknown,
    };
    let m_tvd = match (m_tv, profile.is_doubling()) {
        (Certification::No, _) | (_, false) => Certification::No,
        (c, true) => c,
    };
    ClassFlags {
        m_t,
        m_tv,
        m_tvd,
        has_vacant_row: profile.has_vacant_row(),
        doubling: profile.is_doubling(),
        regular: profile.is_regular(),
    }
}

/// Whether the two distribution sequences agree as multisets, zeros included.
pub fn permutation_equal(e: &CarpetProfile, f: &CarpetProfile) -> bool {
    let mut a = e.distribution().to_vec();
    let mut b = f.distribution().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    VacantRows,
    Doubling,
    Spectrum,
    Dimensions,
    Permutation,
    Regularity,
}

impl InvariantKind {
    pub fn name(&self) -> &'static str {
        match self {
            InvariantKind::VacantRows => "vacant_rows",
            InvariantKind::Doubling => "doubling",
            InvariantKind::Spectrum => "spectrum",
            InvariantKind::Dimensions => "dimensions",
            InvariantKind::Permutation => "permutation",
            InvariantKind::Regularity => "regularity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Same,
    Differs,
    Undecided,
    NotComputed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantEntry {
    pub name: InvariantKind,
    /// Hypotheses certified for both carpets.
    pub applicable: bool,
    /// Computed although a hypothesis is uncertified; never a witness.
    pub conditional: bool,
    pub result: Outcome,
    /// A sentence, or the structured spectrum certificate.
    pub certificate: serde_json::Value,
    /// Why the entry is inapplicable or conditional.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NotEquivalent { witness: InvariantKind },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub invariants: Vec<InvariantEntry>,
    pub verdict: Verdict,
    pub class_flags: [ClassFlags; 2],
    pub same_expansion: bool,
}

impl InvariantReport {
    pub fn entry(&self, kind: InvariantKind) -> Option<&InvariantEntry> {
        self.invariants.iter().find(|e| e.name == kind)
    }

    pub fn witness(&self) -> Option<InvariantKind> {
        match self.verdict {
            Verdict::NotEquivalent { witness } => Some(witness),
            Verdict::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareConfig {
    pub precision_bits: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

/// How a hypothesis on both carpets is certified.
enum Gate {
    Certified,
    Conditional(String),
    Refuted(String),
}

fn gate(flags: [ClassFlags; 2], pick: impl Fn(&ClassFlags) -> Certification, class: &str) -> Gate {
    let certs = flags.map(|f| pick(&f));
    if certs.contains(&Certification::No) {
        Gate::Refuted(format!("not both in {class}"))
    } else if certs.contains(&Certification::Unknown) {
        Gate::Conditional(format!("membership in {class} is not certified"))
    } else {
        Gate::Certified
    }
}

fn entry(name: InvariantKind, gate: &Gate, same: bool, certificate: impl Into<serde_json::Value>) -> InvariantEntry {
    let (applicable, conditional, reason) = match gate {
        Gate::Certified => (true, false, None),
        Gate::Conditional(r) => (false, true, Some(r.clone())),
        Gate::Refuted(r) => (false, false, Some(r.clone())),
    };
    InvariantEntry {
        name,
        applicable,
        conditional,
        result: if same { Outcome::Same } else { Outcome::Differs },
        certificate: certificate.into(),
        reason,
    }
}

fn skipped(name: InvariantKind, reason: &str) -> InvariantEntry {
    InvariantEntry {
        name,
        applicable: false,
        conditional: false,
        result: Outcome::NotComputed,
        certificate: serde_json::Value::Null,
        reason: Some(reason.into()),
    }
}

/// Compares the three dimensions. Differences are certified by interval
/// separation, or exactly for the box and Assouad dimensions; equality is
/// certified exactly when `spectrum_equal` holds, otherwise only observed.
fn compare_dimensions(e: &CarpetProfile, f: &CarpetProfile, bits: usize, spectrum_equal: bool) -> (Outcome, String) {
    let de = dim_intervals(e, bits);
    let df = dim_intervals(f, bits);
    let names = ["hausdorff", "box", "assouad"];
    let sig = decimal_digits(bits);
    let mut undecided = Vec::new();
    for i in 0..3 {
        let diff = de[i].sub(&df[i]);
        if diff.sign().is_some() {
            return (
                Outcome::Differs,
                format!(
                    "{} dimension differs: enclosure of the difference is [{}, {}]",
                    names[i],
                    diff.lo_decimal(sig.min(20)),
                    diff.hi_decimal(sig.min(20))
                ),
            );
        }
        if !(i > 0 && e.expansion() == f.expansion() && exact_dimension_equal(e, f, i)) {
            undecided.push(names[i]);
        }
    }
    if spectrum_equal {
        return (Outcome::Same, "equal spectra force equal dimensions".into());
    }
    if undecided.is_empty() {
        return (Outcome::Same, "box and Assouad equal by exact log identity; Hausdorff enclosures overlap".into());
    }
    (
        Outcome::Undecided,
        format!("{} enclosures overlap at {bits} bits", undecided.join(", ")),
    )
}

/// Exact equality of the box (`i = 1`) or Assouad (`i = 2`) dimension for a
/// shared `(n, m)`, via a vanishing log tensor.
fn exact_dimension_equal(e: &CarpetProfile, f: &CarpetProfile, i: usize) -> bool {
    let q = |v: u32| ExactRational::from_integer(v);
    let (n, m) = (q(e.n()), q(e.m()));
    // dim·ln n·ln m as Σ c ln x ln y.
    let terms = |p: &CarpetProfile| match i {
        1 => vec![
            (1, q(p.digit_count()), m.clone()),
            (1, q(p.occupied_count()), n.clone()),
            (-1, q(p.occupied_count()), m.clone()),
        ],
        _ => vec![(1, q(p.occupied_count()), n.clone()), (1, q(p.max_count()), m.clone())],
    };
    let mut all = terms(e);
    all.extend(terms(f).into_iter().map(|(c, x, y)| (-c, x, y)));
    // Only the exact branch is wanted here; a 64-bit enclosure suffices.
    matches!(log_form_sign(&all, 64).0, Some(0))
}

/// Runs the full battery on a pair of carpets.
pub fn compare(e: &Carpet, f: &Carpet, config: &CompareConfig) -> Result<InvariantReport, SpectrumError> {
    let bits = config.precision_bits;
    let (pe, pf) = (e.profile(), f.profile());
    let flags = [class_membership(pe), class_membership(pf)];
    let same_expansion = pe.expansion() == pf.expansion();
    let mut invariants = Vec::new();
    let mut spectrum_equal = false;

    if same_expansion {
        let g = gate(flags, |c| c.m_t, "M_t");
        invariants.push(entry(
            InvariantKind::VacantRows,
            &g,
            pe.has_vacant_row() == pf.has_vacant_row(),
            format!("vacant rows: {} vs {}", pe.has_vacant_row(), pf.has_vacant_row()),
        ));
        invariants.push(entry(
            InvariantKind::Doubling,
            &g,
            pe.is_doubling() == pf.is_doubling(),
            format!("doubling: {} vs {}", pe.is_doubling(), pf.is_doubling()),
        ));
        let v = spectra_equal(pe, pf, bits)?;
        spectrum_equal = v.value == SpectrumVerdict::Equal;
        let certificate = serde_json::to_value(&v.certificate).expect("certificates serialize");
        let mut spectrum = entry(InvariantKind::Spectrum, &g, spectrum_equal, certificate);
        if v.value == SpectrumVerdict::UndecidedAtPrecision {
            spectrum.result = Outcome::Undecided;
        }
        invariants.push(spectrum);
    } else {
        let why = "expansion pairs differ";
        invariants.push(skipped(InvariantKind::VacantRows, why));
        invariants.push(skipped(InvariantKind::Doubling, why));
        invariants.push(skipped(InvariantKind::Spectrum, why));
    }

    let (outcome, certificate) = compare_dimensions(pe, pf, bits, spectrum_equal);
    invariants.push(InvariantEntry {
        name: InvariantKind::Dimensions,
        applicable: true,
        conditional: false,
        result: outcome,
        certificate: certificate.into(),
        reason: None,
    });

    if same_expansion {
        let sigma_irrational = pe.sigma_class() == SigmaClass::Irrational;
        let g = if sigma_irrational {
            gate(flags, |c| c.m_tvd, "M_t,v,d")
        } else {
            Gate::Refuted("sigma is rational".into())
        };
        invariants.push(entry(
            InvariantKind::Permutation,
            &g,
            permutation_equal(pe, pf),
            format!("distributions {:?} vs {:?}", pe.distribution(), pf.distribution()),
        ));
        invariants.push(entry(
            InvariantKind::Regularity,
            &Gate::Certified,
            pe.is_regular() == pf.is_regular(),
            format!("regular: {} vs {}", pe.is_regular(), pf.is_regular()),
        ));
    } else {
        let why = "expansion pairs differ";
        invariants.push(skipped(InvariantKind::Permutation, why));
        invariants.push(skipped(InvariantKind::Regularity, why));
    }

    let verdict = invariants
        .iter()
        .find(|i| i.applicable && i.result == Outcome::Differs)
        .map_or(Verdict::Inconclusive, |i| Verdict::NotEquivalent { witness: i.name });
    Ok(InvariantReport {
        invariants,
        verdict,
        class_flags: flags,
        same_expansion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;

    fn carpet(n: u32, m: u32, digits: &[(u32, u32)]) -> Carpet {
        Carpet::new(CarpetSpec::new(n, m, digits.iter().copied()).unwrap())
    }

    fn pair_6_4() -> (Carpet, Carpet) {
        (
            carpet(6, 4, &[(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]),
            carpet(6, 4, &[(0, 0), (2, 0), (4, 0), (1, 1), (1, 3), (2, 3)]),
        )
    }

    fn pair_27_8() -> (Carpet, Carpet) {
        let mut d = vec![(1, 1), (4, 1), (7, 1)];
        d.extend((1..=6).map(|i| (2 * i - 1, 4)));
        let mut dp: Vec<_> = (0..4).map(|i| (1, 2 * i)).collect();
        dp.extend([(3, 4), (3, 6)]);
        (carpet(27, 8, &d), carpet(27, 8, &dp))
    }

    #[test]
    fn membership_flags() {
        let (e, f) = pair_27_8();
        assert_eq!(class_membership(e.profile()).m_tvd, Certification::Yes);
        assert_eq!(class_membership(f.profile()).m_tvd, Certification::Yes);
        let (_, f64_carpet) = pair_6_4();
        let flags = class_membership(f64_carpet.profile());
        assert_eq!(flags.m_tv, Certification::Yes);
        assert_eq!(flags.m_tvd, Certification::No);
        let full = CarpetProfile::from_distribution(3, 2, vec![2, 2]).unwrap();
        let flags = class_membership(&full);
        assert_eq!(flags.m_t, Certification::Unknown);
        assert_eq!(flags.m_tv, Certification::No);
    }

    #[test]
    fn permutations() {
        let (e, f) = pair_27_8();
        assert!(!permutation_equal(e.profile(), f.profile()));
        assert!(permutation_equal(e.profile(), e.profile()));
        let a = CarpetProfile::from_distribution(5, 4, vec![3, 2, 1, 0]).unwrap();
        let b = CarpetProfile::from_distribution(5, 4, vec![0, 1, 2, 3]).unwrap();
        assert!(permutation_equal(&a, &b));
    }

    #[test]
    fn doubling_separates_6x4_pair() {
        let (e, f) = pair_6_4();
        let r = compare(&e, &f, &CompareConfig::default()).unwrap();
        assert_eq!(r.witness(), Some(InvariantKind::Doubling));
        assert_eq!(r.entry(InvariantKind::Spectrum).unwrap().result, Outcome::Same);
    }

    #[test]
    fn permutation_separates_27x8_pair() {
        let (e, f) = pair_27_8();
        let r = compare(&e, &f, &CompareConfig::default()).unwrap();
        assert_eq!(r.witness(), Some(InvariantKind::Permutation));
        assert_eq!(r.entry(InvariantKind::Spectrum).unwrap().result, Outcome::Same);
        assert_eq!(r.entry(InvariantKind::Dimensions).unwrap().result, Outcome::Same);
    }

    #[test]
    fn self_comparison_is_inconclusive() {
        let (e, _) = pair_27_8();
        let r = compare(&e, &e, &CompareConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.invariants.iter().all(|i| i.result != Outcome::Differs));
    }

    #[test]
    fn uncertified_differences_are_not_witnesses() {
        // No vacant rows: total disconnectedness unknown for both.
        let e = carpet(3, 2, &[(0, 0), (1, 1)]);
        let f = carpet(3, 2, &[(0, 0), (2, 0), (1, 1)]);
        let r = compare(&e, &f, &CompareConfig::default()).unwrap();
        let spectrum = r.entry(InvariantKind::Spectrum).unwrap();
        assert!(spectrum.conditional && !spectrum.applicable);
        // Dimensions are unconditional and differ here.
        assert_eq!(r.witness(), Some(InvariantKind::Dimensions));
    }

    #[test]
    fn different_expansions_only_compare_dimensions() {
        let (e, _) = pair_6_4();
        let (f, _) = pair_27_8();
        let r = compare(&e, &f, &CompareConfig::default()).unwrap();
        assert!(!r.same_expansion);
        let applicable: Vec<_> = r.invariants.iter().filter(|i| i.applicable).map(|i| i.name).collect();
        assert_eq!(applicable, vec![InvariantKind::Dimensions]);
    }
}

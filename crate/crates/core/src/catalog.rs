//! Catalog of hypergeometric representations and two structural checks on
//! them: every non-rational term of a representation must carry the same
//! number of independent derivative-basis elements, and that common count
//! must equal the declared number of master integrals.
//!
//! Declared master counts are external data with recorded citations; this
//! module never derives them.  Representations whose terms are all rational
//! (pure gamma-function content) opt out of the numeric comparison through
//! the literal token [`GAMMA_EXPRESSIBLE`] in their `masters_note`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{basis_count, BasisReport};
use crate::error::{Error, Result};
use crate::pfq::PFQSpec;
use crate::ratfun::RatFun;

/// Marker token for entries whose masters are all expressible through gamma
/// functions; such entries pass the master-count check by declaration.
pub const GAMMA_EXPRESSIBLE: &str = "gamma-expressible";

/// One term `S(z, eps) · pFq(...; z)` of a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperTerm {
    pub prefactor: RatFun,
    pub function: PFQSpec,
}

/// A sum of prefactor × pFq terms sharing one argument variable.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperRepresentation {
    pub terms: Vec<HyperTerm>,
    pub argument_note: String,
}

impl HyperRepresentation {
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Catalog("representation has no terms".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            t.function
                .validate()
                .map_err(|e| Error::Catalog(format!("term {i}: {e}")))?;
        }
        Ok(())
    }
}

/// A named representation with its externally declared master-integral
/// count and the citation backing it.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub representation: HyperRepresentation,
    pub expected_masters: u32,
    pub masters_note: String,
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    #[serde(rename = "S")]
    s: String,
    #[serde(rename = "pFq")]
    pfq: PFQSpec,
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    name: String,
    terms: Vec<TermWire>,
    #[serde(default)]
    argument_note: String,
    expected_masters: u32,
    #[serde(default)]
    masters_note: String,
    #[serde(default)]
    provenance: String,
}

impl Serialize for CatalogEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EntryWire {
            name: self.name.clone(),
            terms: self
                .representation
                .terms
                .iter()
                .map(|t| TermWire {
                    s: t.prefactor.to_string(),
                    pfq: t.function.clone(),
                })
                .collect(),
            argument_note: self.representation.argument_note.clone(),
            expected_masters: self.expected_masters,
            masters_note: self.masters_note.clone(),
            provenance: self.provenance.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CatalogEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = EntryWire::deserialize(d)?;
        let mut terms = Vec::with_capacity(w.terms.len());
        for t in &w.terms {
            terms.push(HyperTerm {
                prefactor: t.s.parse().map_err(serde::de::Error::custom)?,
                function: t.pfq.clone(),
            });
        }
        Ok(CatalogEntry {
            name: w.name,
            representation: HyperRepresentation {
                terms,
                argument_note: w.argument_note,
            },
            expected_masters: w.expected_masters,
            masters_note: w.masters_note,
            provenance: w.provenance,
        })
    }
}

impl CatalogEntry {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Catalog("entry has an empty name".into()));
        }
        if self.expected_masters == 0 {
            return Err(Error::Catalog(format!(
                "entry '{}': expected_masters must be >= 1",
                self.name
            )));
        }
        self.representation
            .validate()
            .map_err(|e| Error::Catalog(format!("entry '{}': {e}", self.name)))
    }
}

/// Outcome of the per-term uniformity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub pass: bool,
    pub counts: Vec<BasisReport>,
}

/// Every term is counted; terms whose functions are rational
/// (`nontrivial_count = 0`) are excluded from the uniformity comparison.
pub fn check_uniform_basis(rep: &HyperRepresentation) -> Result<UniformityReport> {
    rep.validate()?;
    let mut counts = Vec::with_capacity(rep.terms.len());
    for (i, t) in rep.terms.iter().enumerate() {
        let report = basis_count(&t.function)
            .map_err(|e| Error::Catalog(format!("term {i}: {e}")))?;
        counts.push(report);
    }
    let nontrivial: Vec<usize> = counts
        .iter()
        .map(|c| c.nontrivial_count)
        .filter(|&c| c > 0)
        .collect();
    let pass = nontrivial.windows(2).all(|w| w[0] == w[1]);
    Ok(UniformityReport { pass, counts })
}

/// Outcome of comparing the common basis count against the declared master
/// count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterCountReport {
    pub pass: bool,
    pub computed: usize,
    pub expected: u32,
}

/// The computed master count is the common nontrivial basis size — the
/// derivatives `F', ..., F^(L)` plus the function itself.  All-rational
/// representations pass exactly when their note carries the
/// [`GAMMA_EXPRESSIBLE`] token.
pub fn check_master_count(entry: &CatalogEntry) -> Result<MasterCountReport> {
    entry.validate()?;
    let uniformity = check_uniform_basis(&entry.representation)?;
    if !uniformity.pass {
        return Err(Error::Catalog(format!(
            "entry '{}': nontrivial counts differ across terms ({:?}); see check_uniform_basis",
            entry.name,
            uniformity
                .counts
                .iter()
                .map(|c| c.nontrivial_count)
                .collect::<Vec<_>>()
        )));
    }
    match uniformity
        .counts
        .iter()
        .map(|c| c.nontrivial_count)
        .find(|&c| c > 0)
    {
        Some(common) => Ok(MasterCountReport {
            pass: common == entry.expected_masters as usize,
            computed: common,
            expected: entry.expected_masters,
        }),
        None => Ok(MasterCountReport {
            pass: entry.masters_note.contains(GAMMA_EXPRESSIBLE),
            computed: 0,
            expected: entry.expected_masters,
        }),
    }
}

/// Parse catalog entries from a JSON string; enforces non-emptiness, entry
/// invariants, and unique names.
pub fn parse_catalog(json: &str) -> Result<Vec<CatalogEntry>> {
    let entries: Vec<CatalogEntry> =
        serde_json::from_str(json).map_err(|e| Error::Catalog(format!("schema: {e}")))?;
    if entries.is_empty() {
        return Err(Error::Catalog("no entries".into()));
    }
    let mut seen = BTreeSet::new();
    for (i, e) in entries.iter().enumerate() {
        e.validate()
            .map_err(|err| Error::Catalog(format!("entry {i}: {err}")))?;
        if !seen.insert(e.name.clone()) {
            return Err(Error::Catalog(format!("duplicate entry name '{}'", e.name)));
        }
    }
    Ok(entries)
}

/// Load and validate a catalog file.
pub fn load_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_catalog(&text)
}

/// Machine-readable per-entry verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub name: String,
    pub uniform: bool,
    pub counts: Vec<BasisReport>,
    pub computed: usize,
    pub expected: u32,
    pub pass: bool,
}

/// Run both checks over all entries; the report is ordered by entry name.
pub fn check_catalog(entries: &[CatalogEntry]) -> Result<Vec<EntryReport>> {
    let mut reports = Vec::with_capacity(entries.len());
    for entry in entries {
        entry.validate()?;
        let uniformity = check_uniform_basis(&entry.representation)?;
        let report = if uniformity.pass {
            let mc = check_master_count(entry)?;
            EntryReport {
                name: entry.name.clone(),
                uniform: true,
                counts: uniformity.counts,
                computed: mc.computed,
                expected: mc.expected,
                pass: mc.pass,
            }
        } else {
            EntryReport {
                name: entry.name.clone(),
                uniform: false,
                counts: uniformity.counts,
                computed: 0,
                expected: entry.expected_masters,
                pass: false,
            }
        };
        reports.push(report);
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pfq(upper: &[&str], lower: &[&str]) -> PFQSpec {
        PFQSpec::new(
            upper.iter().map(|s| s.parse().unwrap()).collect(),
            lower.iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap()
    }

    fn term(s: &str, f: PFQSpec) -> HyperTerm {
        HyperTerm {
            prefactor: s.parse().unwrap(),
            function: f,
        }
    }

    fn rep(terms: Vec<HyperTerm>) -> HyperRepresentation {
        HyperRepresentation {
            terms,
            argument_note: String::new(),
        }
    }

    fn entry(name: &str, terms: Vec<HyperTerm>, expected: u32, note: &str) -> CatalogEntry {
        CatalogEntry {
            name: name.into(),
            representation: rep(terms),
            expected_masters: expected,
            masters_note: note.into(),
            provenance: "test".into(),
        }
    }

    fn catalog_dir() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
    }

    #[test]
    fn uniform_across_generic_terms() {
        let r = rep(vec![
            term("1", pfq(&["1/2+eps", "1/3"], &["3/2"])),
            term("1/(1-z)", pfq(&["1/4", "1/5+eps"], &["7/4"])),
        ]);
        let u = check_uniform_basis(&r).unwrap();
        assert!(u.pass);
        assert_eq!(
            u.counts.iter().map(|c| c.nontrivial_count).collect::<Vec<_>>(),
            vec![2, 2]
        );
    }

    #[test]
    fn mixed_counts_fail_uniformity() {
        let r = rep(vec![
            term("1", pfq(&["1/2+eps", "1/3"], &["3/2"])),
            term("1", pfq(&["1/2"], &[])),
        ]);
        let u = check_uniform_basis(&r).unwrap();
        assert!(!u.pass);
        assert_eq!(
            u.counts.iter().map(|c| c.nontrivial_count).collect::<Vec<_>>(),
            vec![2, 1]
        );
    }

    #[test]
    fn single_term_trivially_uniform() {
        let u = check_uniform_basis(&rep(vec![term("1", pfq(&["1/2+eps", "1/3"], &["3/2"]))]))
            .unwrap();
        assert!(u.pass);
    }

    #[test]
    fn rational_terms_excluded_from_uniformity() {
        let r = rep(vec![
            term("1", pfq(&["1/2+eps", "1/3"], &["3/2"])),
            term("1/eps", pfq(&["0"], &[])),
        ]);
        let u = check_uniform_basis(&r).unwrap();
        assert!(u.pass);
        assert_eq!(u.counts[1].nontrivial_count, 0);
    }

    #[test]
    fn master_count_examples() {
        let gauss = entry("g", vec![term("1", pfq(&["1/2+eps", "1/3"], &["3/2"]))], 2, "");
        let ok = check_master_count(&gauss).unwrap();
        assert!(ok.pass);
        assert_eq!(ok.computed, 2);

        let threef = entry(
            "t",
            vec![term("1", pfq(&["1/2+eps", "1/3", "1/5"], &["3/2", "7/3"]))],
            3,
            "",
        );
        let ok = check_master_count(&threef).unwrap();
        assert!(ok.pass);
        assert_eq!(ok.computed, 3);

        let wrong = entry("w", vec![term("1", pfq(&["1/2+eps", "1/3"], &["3/2"]))], 3, "");
        let bad = check_master_count(&wrong).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.computed, 2);
        assert_eq!(bad.expected, 3);
    }

    #[test]
    fn all_rational_requires_token() {
        let with = entry(
            "p",
            vec![term("1/eps", pfq(&["0"], &[]))],
            1,
            "gamma-expressible master",
        );
        assert!(check_master_count(&with).unwrap().pass);
        let without = entry("q", vec![term("1/eps", pfq(&["0"], &[]))], 1, "");
        assert!(!check_master_count(&without).unwrap().pass);
    }

    #[test]
    fn nonuniform_entry_errors_in_master_count() {
        let e = entry(
            "bad",
            vec![
                term("1", pfq(&["1/2+eps", "1/3"], &["3/2"])),
                term("1", pfq(&["1/2"], &[])),
            ],
            2,
            "",
        );
        let err = check_master_count(&e).unwrap_err();
        assert!(err.to_string().contains("check_uniform_basis"));
    }

    #[test]
    fn prefactor_never_affects_counts() {
        let base = rep(vec![term("1", pfq(&["1/2+eps", "1/3"], &["3/2"]))]);
        let scaled = rep(vec![term(
            "7*z/(1-z)^3",
            pfq(&["1/2+eps", "1/3"], &["3/2"]),
        )]);
        assert_eq!(
            check_uniform_basis(&base).unwrap(),
            check_uniform_basis(&scaled).unwrap()
        );
    }

    #[test]
    fn class_preserving_shift_keeps_uniformity() {
        let r = rep(vec![
            term("1", pfq(&["1/2+eps", "1/3"], &["3/2"])),
            term("1", pfq(&["3/2+eps", "4/3"], &["5/2"])),
        ]);
        assert!(check_uniform_basis(&r).unwrap().pass);
    }

    #[test]
    fn entry_invariants_enforced() {
        assert!(parse_catalog("[]").unwrap_err().to_string().contains("no entries"));
        let zero = r#"[{"name":"z","terms":[{"S":"1","pFq":{"upper":["1/2"],"lower":[]}}],"expected_masters":0}]"#;
        assert!(parse_catalog(zero)
            .unwrap_err()
            .to_string()
            .contains("expected_masters"));
        let dup = r#"[
            {"name":"a","terms":[{"S":"1","pFq":{"upper":["1/2"],"lower":[]}}],"expected_masters":1},
            {"name":"a","terms":[{"S":"1","pFq":{"upper":["1/2"],"lower":[]}}],"expected_masters":1}
        ]"#;
        assert!(parse_catalog(dup)
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
    }

    #[test]
    fn entry_serde_round_trip() {
        let e = entry(
            "rt",
            vec![term("1/(eps*(1-z))", pfq(&["1", "eps"], &["3/2"]))],
            2,
            "note",
        );
        let json = serde_json::to_string(&e).unwrap();
        let back: CatalogEntry = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn shipped_catalog_all_pass() {
        let entries = load_catalog(&catalog_dir().join("catalog.json")).unwrap();
        assert!(entries.len() >= 5, "only {} entries", entries.len());
        let reports = check_catalog(&entries).unwrap();
        for r in &reports {
            assert!(r.uniform, "{} not uniform", r.name);
            assert!(r.pass, "{} failed: computed {} expected {}", r.name, r.computed, r.expected);
        }
        // Order-stable by name.
        let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn mismatch_fixture_fails() {
        let entries = load_catalog(&catalog_dir().join("mismatch_fixture.json")).unwrap();
        let reports = check_catalog(&entries).unwrap();
        assert!(reports.iter().any(|r| !r.pass));
    }
}

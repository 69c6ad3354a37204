//! Worked examples of pairs `(M, L)` with known lattices, shipped as JSON
//! fixtures and re-derived on demand.
//!
//! Topological inputs (Seifert structures, knot group properties, saturated
//! annuli) enter only as data and flags; [`check`] recomputes everything that
//! follows from them and compares with the recorded expectations.

use serde::{Deserialize, Serialize};

use crate::bounds::{diameter_ledger, verdict_from_knowledge, KnowledgeSpec, LatticeKnowledge, ManifoldContext, Status, Verdict};
use crate::lattice::{IntLattice, LatticeError, QuotientInfo};

const SOURCES: [(&str, &str); 9] = [
    ("hopf-1", include_str!("../fixtures/hopf-1.json")),
    ("hopf-2", include_str!("../fixtures/hopf-2.json")),
    ("hopf-3", include_str!("../fixtures/hopf-3.json")),
    ("hopf-4", include_str!("../fixtures/hopf-4.json")),
    ("torus-knot", include_str!("../fixtures/torus-knot.json")),
    ("non-torus-knot", include_str!("../fixtures/non-torus-knot.json")),
    ("seifert-multiple-fiber", include_str!("../fixtures/seifert-multiple-fiber.json")),
    ("foliation-parallel-annulus", include_str!("../fixtures/foliation-parallel-annulus.json")),
    ("circle-bundle", include_str!("../fixtures/circle-bundle.json")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingFlags {
    /// The circle's class meets the center of the relevant fundamental group trivially.
    pub center_trivial: bool,
    /// The circle (or its peripheral torus) injects on fundamental groups.
    pub pi1_injective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Expected {
    pub status: Option<Status>,
    pub rank: Option<usize>,
    /// Per-coordinate orders, integers or `"inf"`.
    pub k: Option<serde_json::Value>,
    #[serde(default, with = "double_option")]
    pub k_hat: Option<Option<u64>>,
    pub cyclic_generator: Option<u64>,
    /// Hermite basis of `A`.
    pub basis: Option<Vec<Vec<i64>>>,
    /// For `m = 1` when only a sublattice is known: `k` divides this.
    pub k_divides: Option<u64>,
}

/// Distinguishes an absent key from an explicit `null`.
mod double_option {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Option<u64>>, s: S) -> Result<S::Ok, S::Error> {
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<u64>>, D::Error> {
        Option::<u64>::deserialize(d).map(Some)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub context: ManifoldContext,
    pub knowledge: KnowledgeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_degrees: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanishing_flags: Option<VanishingFlags>,
    pub expected: Expected,
}

/// `A` for `m` fibers of the Hopf fibration `S³ → S²`.
pub fn hopf_lattice(m: usize) -> Result<IntLattice, LatticeError> {
    match m {
        0 => Err(LatticeError::DimensionOutOfRange(0)),
        1 | 2 => IntLattice::full(m),
        _ => IntLattice::normalize(m, &[vec![1; m]]),
    }
}

/// Degrees of the orbit maps of a circle action having each component of `L` as an orbit.
/// The loop of isotopies given by the action shows this vector lies in `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDegrees(pub Vec<i64>);

pub fn s1_action_vector(degrees: &[i64]) -> OrbitDegrees {
    OrbitDegrees(degrees.to_vec())
}

impl OrbitDegrees {
    /// Whether a candidate `A` is compatible with the action.
    pub fn holds_in(&self, a: &IntLattice) -> Result<bool, LatticeError> {
        a.member(&self.0)
    }

    /// The sublattice generated by the degree vector.
    pub fn sublattice(&self) -> Result<IntLattice, LatticeError> {
        IntLattice::normalize(self.0.len(), &[self.0.clone()])
    }

    /// For one circle, `A = kℤ` with `k` dividing the orbit degree.
    pub fn k_divides(&self) -> Option<u64> {
        match self.0.as_slice() {
            [d] => Some(d.unsigned_abs()),
            _ => None,
        }
    }
}

/// When both flags hold every loop of isotopies has rotation number 0, so `A = {0}`.
pub fn vanishing_condition(flags: VanishingFlags) -> Option<IntLattice> {
    (flags.center_trivial && flags.pi1_injective).then(|| IntLattice::cyclic(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub check: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientInfo>,
    pub checks: Vec<CheckItem>,
}

pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| serde_json::from_str(src).expect("bundled fixture parses"))
}

pub fn all() -> Vec<Fixture> {
    names().into_iter().filter_map(fixture).collect()
}

/// Recomputes the fixture's quotient invariants and verdict and compares them with its expectations.
pub fn check(fx: &Fixture) -> CheckReport {
    let mut checks = Vec::new();
    let mut record = |what: String, ok: bool| checks.push(CheckItem { check: what, ok });
    let mut verdict = None;
    let mut quotient = None;

    let knowledge = fx.knowledge.build();
    let context = fx.context.clone().validated();
    record("context is valid".into(), context.is_ok());
    record("lattice data is valid".into(), knowledge.is_ok());

    if let (Ok(ctx), Ok(know)) = (context, knowledge) {
        match verdict_from_knowledge(&ctx, &know) {
            Ok(v) => {
                if let Some(st) = fx.expected.status {
                    record(format!("verdict {:?} (expected {st:?})", v.status), v.status == st);
                }
                verdict = Some(v);
            }
            Err(e) => record(format!("verdict: {e}"), false),
        }

        if let LatticeKnowledge::Exact(a) = &know {
            let info = a.quotient_info();
            let ex = &fx.expected;
            if let Some(r) = ex.rank {
                record(format!("rank {} (expected {r})", info.rank), info.rank == r);
            }
            if let Some(k) = &ex.k {
                let got = serde_json::to_value(&info.k).expect("orders serialize");
                record(format!("k = {got} (expected {k})"), &got == k);
            }
            if let Some(kh) = ex.k_hat {
                record(format!("k^ = {:?} (expected {kh:?})", info.k_hat), info.k_hat == kh);
            }
            if let Some(c) = ex.cyclic_generator {
                record(format!("A = {}Z", c), info.cyclic_generator == Some(c));
            }
            if let Some(b) = &ex.basis {
                record(format!("basis {:?} (expected {b:?})", a.basis()), a.basis() == b.as_slice());
            }
            let ledger = diameter_ledger(&ctx, &info, None);
            record("diameter ledger is consistent".into(), ledger.is_ok());
            if let Some(v) = &verdict {
                if v.status == Status::Bounded {
                    let finite = ledger.as_ref().is_ok_and(|l| {
                        l.upper(crate::bounds::Quantity::Cld).is_finite()
                            && l.upper(crate::bounds::Quantity::Clbd).is_finite()
                    });
                    record("bounded verdict has finite diameter bounds".into(), finite);
                }
                if v.status == Status::Unbounded {
                    record("kernel functional exists".into(), a.kernel_functional().is_ok());
                }
            }
            quotient = Some(info);
        }

        if let Some(deg) = &fx.orbit_degrees {
            let orbit = s1_action_vector(deg);
            match &know {
                LatticeKnowledge::Exact(a) => {
                    record(format!("orbit degrees {deg:?} lie in A"), orbit.holds_in(a).unwrap_or(false));
                }
                LatticeKnowledge::Contains(b) => {
                    let same = orbit.sublattice().is_ok_and(|s| &s == b);
                    record(format!("known sublattice is generated by orbit degrees {deg:?}"), same);
                }
                LatticeKnowledge::RankAtMost { .. } => {}
            }
            if let Some(d) = fx.expected.k_divides {
                record(format!("k divides {d}"), orbit.k_divides() == Some(d));
            }
        }

        if let Some(flags) = fx.vanishing_flags {
            match vanishing_condition(flags) {
                Some(zero) => {
                    let ok = matches!(&know, LatticeKnowledge::Exact(a) if *a == zero);
                    record("vanishing conditions force A = {0}".into(), ok);
                }
                None => record("vanishing conditions do not apply".into(), true),
            }
        }
    }

    let passed = checks.iter().all(|c| c.ok);
    CheckReport { name: fx.name.clone(), passed, verdict, quotient, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_checks() {
        for fx in all() {
            let report = check(&fx);
            assert!(report.passed, "{}: {:#?}", fx.name, report.checks);
        }
        assert_eq!(all().len(), names().len());
    }

    #[test]
    fn hopf_lattice_table() {
        assert_eq!(hopf_lattice(1).unwrap().rank(), 1);
        assert_eq!(hopf_lattice(2).unwrap(), IntLattice::full(2).unwrap());
        assert_eq!(hopf_lattice(4).unwrap().rank(), 1);
        for m in 1..=4 {
            let fx = fixture(&format!("hopf-{m}")).unwrap();
            let KnowledgeSpec::Exact(spec) = &fx.knowledge else { panic!("exact lattice") };
            assert_eq!(IntLattice::from_spec(spec).unwrap(), hopf_lattice(m).unwrap());
        }
    }

    #[test]
    fn orbit_degrees() {
        let a = hopf_lattice(3).unwrap();
        assert!(s1_action_vector(&[1, 1, 1]).holds_in(&a).unwrap());
        assert!(!s1_action_vector(&[1, 0, 1]).holds_in(&a).unwrap());
        assert!(s1_action_vector(&[0, 0, 0]).holds_in(&IntLattice::cyclic(0).clone()).is_err());
        assert!(s1_action_vector(&[0]).holds_in(&IntLattice::cyclic(0)).unwrap());
        assert_eq!(s1_action_vector(&[-3]).k_divides(), Some(3));
    }

    #[test]
    fn vanishing() {
        let both = VanishingFlags { center_trivial: true, pi1_injective: true };
        let a = vanishing_condition(both).unwrap();
        assert_eq!(a.quotient_info().cyclic_generator, Some(0));
        assert!(vanishing_condition(VanishingFlags { center_trivial: false, pi1_injective: true }).is_none());
        assert!(vanishing_condition(VanishingFlags { center_trivial: false, pi1_injective: false }).is_none());
    }

    #[test]
    fn broken_expectation_is_reported() {
        let mut fx = fixture("hopf-3").unwrap();
        fx.expected.status = Some(Status::Bounded);
        assert!(!check(&fx).passed);
    }
}

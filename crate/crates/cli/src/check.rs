//! The invariant suite behind `ncjet check`.

use std::fmt::Write as _;
use std::sync::Arc;

use ncjet_core::algebra::{validate_algebra, Family};
use ncjet_core::bimodule::{hom_left_linear, Bimodule};
use ncjet_core::diffops::{
    is_weak_operator, symbol, symbol2, symbol_compose, weak_diffop_space, Symbol,
};
use ncjet_core::exactla::{image, kernel, unit_vec};
use ncjet_core::jets::{
    prolong_is_injective, relation_tower, representability_defect, skeletal_jet, RelationTower,
};
use ncjet_core::vectorfields::{
    actions_coincide, asym, bracket_table, clifford_invariance, leibniz_check,
    orthogonal_projector, skew_projector, vector_fields, VectorFieldSpace,
};
use ncjet_core::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// Reported, never counted as a failure.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub checks: Vec<CheckItem>,
}

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
    Info(String),
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    if ok {
        Verdict::Pass(detail.into())
    } else {
        Verdict::Fail(detail.into())
    }
}

#[derive(Default)]
struct Suite {
    items: Vec<CheckItem>,
}

impl Suite {
    fn run(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<Verdict>) {
        let (status, detail) = match f() {
            Ok(Verdict::Pass(d)) => (Status::Pass, d),
            Ok(Verdict::Fail(d)) => (Status::Fail, d),
            Ok(Verdict::Skip(d)) => (Status::Skip, d),
            Ok(Verdict::Info(d)) => (Status::Info, d),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        self.items.push(CheckItem {
            name: name.into(),
            status,
            detail,
        });
    }

    fn extend(&mut self, other: Suite) {
        self.items.extend(other.items);
    }
}

fn module_suite(inst: &Instance, name: &str, e: &Arc<Bimodule>) -> Suite {
    let mut s = Suite::default();
    let tag = |what: &str| format!("{what} [{name}]");
    let tower = relation_tower(&inst.calculus, e);
    let t = match tower {
        Ok(t) => t,
        Err(err) => {
            s.run(tag("relation tower"), || Err(err));
            return s;
        }
    };
    s.run(tag("relation tower"), || {
        Ok(Verdict::Pass(format!(
            "dims N⁰ {}, N¹ {}; relations descend: {}; Tor₁: {}",
            t.n0().dim(),
            t.n1().dim(),
            t.tor_ok(),
            t.tor1_dim().map_or("not computed".into(), |d| d.to_string())
        )))
    });
    let top = if t.tor_ok() { 2 } else { 1 };
    s.run(tag("jet exact sequences"), || {
        for n in 1..=top {
            let hi = skeletal_jet(&t, n)?;
            let lo = skeletal_jet(&t, n - 1)?;
            let down = hi.proj_down().expect("positive order");
            let exact = kernel(down) == *hi.symmetric()
                && image(down).dim() == lo.dim()
                && hi.dim() == hi.symmetric().dim() + lo.dim();
            if !exact {
                return Ok(Verdict::Fail(format!("0 → 𝕊{n} → 𝕁{n} → 𝕁{} → 0 is not exact", n - 1)));
            }
        }
        Ok(Verdict::Pass(format!("orders 1..={top}")))
    });
    s.run(tag("prolongation"), || {
        for n in 0..=top {
            let j = skeletal_jet(&t, n)?;
            if prolong_is_injective(&t, n)? != (j.prolong().rank() == e.dim()) {
                return Ok(Verdict::Fail(format!("injectivity test disagrees at order {n}")));
            }
        }
        Ok(Verdict::Pass("intersection test agrees with the rank of prolong".into()))
    });
    if inst.calculus.is_universal() {
        s.run(tag("universal collapse"), || {
            let want = inst.algebra.dim() * e.dim();
            let ok = (1..=2).all(|n| {
                skeletal_jet(&t, n).map(|j| j.dim() == want).unwrap_or(false)
                    && t.relations(n).map(|r| r.is_zero()).unwrap_or(false)
            });
            Ok(verdict(ok, format!("dim 𝕁¹ = dim 𝕁² = {want}, N¹ = N² = 0")))
        });
    }
    let defect = if t.tor_ok() {
        representability_defect(&t, &inst.exterior2).ok()
    } else {
        None
    };
    s.run(tag("representability"), || match defect {
        Some(d) => Ok(Verdict::Pass(format!("defect {d}"))),
        None if !t.tor_ok() => Ok(Verdict::Skip("relations do not descend".into())),
        None => representability_defect(&t, &inst.exterior2).map(|d| Verdict::Pass(format!("defect {d}"))),
    });
    s.run(tag("operator filtration"), || {
        let spaces = (0..=top)
            .map(|k| weak_diffop_space(&t, e, k))
            .collect::<Result<Vec<_>>>()?;
        let nested = spaces.windows(2).all(|w| w[1].basis.contains_subspace(&w[0].basis));
        let zero_is_linear = spaces[0].basis == hom_left_linear(e, e)?;
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        Ok(verdict(nested && zero_is_linear, format!("dims {dims:?}")))
    });
    s.run(tag("symbol soundness"), || {
        if defect != Some(0) {
            return Ok(Verdict::Skip("needs defect 0".into()));
        }
        let d1 = weak_diffop_space(&t, e, 1)?;
        let d2 = weak_diffop_space(&t, e, 2)?;
        for op in d2.operators() {
            if symbol2(&t, e, &op)?.is_zero() != d1.contains(&op) {
                return Ok(Verdict::Fail("symbol vanishes off the order-1 space or vice versa".into()));
            }
        }
        Ok(Verdict::Pass(format!("{} order-2 basis operators", d2.dim())))
    });
    s
}

fn field_suite(inst: &Instance, v: &VectorFieldSpace, t: &RelationTower) -> Suite {
    let mut s = Suite::default();
    let a = &inst.algebra;
    let x2 = &inst.exterior2;
    s.run("vector fields: duality", || {
        v.check_duality()?;
        Ok(Verdict::Pass(format!("dim 𝔛 = {}", v.dim())))
    });
    s.run("vector fields: bimodule axioms", || {
        v.module().validate_exhaustive()?;
        Ok(Verdict::Pass("all basis triples".into()))
    });
    s.run("vector fields: interior product", || {
        let c = &inst.calculus;
        for (k, x) in v.fields().iter().enumerate() {
            for i in 0..a.dim() {
                let da = c.d().col(i);
                let th = v.theta(&unit_vec(v.dim(), k)).mul_vec(&da);
                if th != x.col(i) {
                    return Ok(Verdict::Fail(format!("⟨d{}, X{k}⟩ ≠ X{k}({})", a.label(i), a.label(i))));
                }
            }
        }
        Ok(Verdict::Pass("⟨da, X⟩ = X(a) on all basis pairs".into()))
    });
    s.run("Leibniz rule", || {
        let r = leibniz_check(v)?;
        let classical = match &r.classical_failures {
            Some(f) => format!("; classical form checked, {} failures", f.len()),
            None => String::new(),
        };
        Ok(verdict(
            r.passed(),
            format!("{} triples, {} failures{classical}", r.checked, r.failures.len()),
        ))
    });
    s.run("left and right actions", || {
        let symmetric = leibniz_check(v)?.classical_failures.is_some();
        if !symmetric {
            return Ok(Verdict::Skip("only expected to coincide for symmetric Ω¹ over commutative A".into()));
        }
        Ok(verdict(actions_coincide(v)?, "left action equals right action"))
    });
    s.run("pairing balanced", || {
        if x2.s2().is_zero() {
            return Ok(Verdict::Skip("S² = 0, the pairing is not needed".into()));
        }
        v.check_pairing_balanced()?;
        Ok(Verdict::Pass("over both tensor products".into()))
    });
    s.run("composites of fields", || {
        if !t.tor_ok() {
            return Ok(Verdict::Skip("relations do not descend".into()));
        }
        let e = t.module();
        for x in v.fields() {
            for y in v.fields() {
                if !is_weak_operator(t, e, &(y * x), 2)? {
                    return Ok(Verdict::Fail("Y∘X is not of order 2".into()));
                }
            }
        }
        Ok(Verdict::Pass(format!("{} composites of order ≤ 2", v.dim() * v.dim())))
    });
    s.run("symbol of composites", || {
        if !t.tor_ok() {
            return Ok(Verdict::Skip("relations do not descend".into()));
        }
        let e = t.module();
        let take = v.dim().min(4);
        for x in &v.fields()[..take] {
            for y in &v.fields()[..take] {
                let via = symbol_compose(t, t, e, (y, 1), (x, 1))?;
                let direct = symbol(t, e, &(y * x), 2)?;
                if via != direct {
                    return Ok(Verdict::Fail("composed symbol differs from the direct one".into()));
                }
                if !matches!(direct, Symbol::Order2(_)) {
                    return Ok(Verdict::Fail("composite symbol has the wrong order".into()));
                }
            }
        }
        Ok(Verdict::Pass(format!("{} pairs", take * take)))
    });
    let asym_data = asym(v, x2);
    s.run("Asym closure", || {
        let ad = asym_data.clone()?;
        if !ad.maximal {
            return Ok(Verdict::Skip("Ω² is not maximal".into()));
        }
        for xi in ad.asym.vectors() {
            if !v.contains(&v.compose_c(&xi)) {
                return Ok(Verdict::Fail("c(ξ) leaves 𝔛 for some ξ ∈ Asym".into()));
            }
        }
        Ok(Verdict::Pass(format!("dim Asym = {}, dim Ann = {}", ad.asym.dim(), ad.ann.dim())))
    });
    s.run("orthogonal projector", || {
        let ad = asym_data.clone()?;
        let Some(g) = &inst.gram else {
            return Ok(Verdict::Skip("no gram".into()));
        };
        let p = orthogonal_projector(v, &ad, g)?;
        p.validate(&ad)?;
        if !ad.maximal {
            return Ok(Verdict::Pass("projector contract; brackets skipped, Ω² not maximal".into()));
        }
        let closed = bracket_table(v, &p).iter().flatten().all(|b| b.coords.is_some());
        Ok(verdict(closed, "projector contract and bracket closure"))
    });
    s.run("skew projector", || {
        let ad = asym_data.clone()?;
        if !a.is_commutative() || !ad.maximal {
            return Ok(Verdict::Skip("checked for commutative algebras with maximal Ω²".into()));
        }
        let p = skew_projector(v);
        p.validate(&ad)?;
        let closed = bracket_table(v, &p).iter().flatten().all(|b| b.coords.is_some());
        Ok(verdict(closed, "image inside Asym and bracket closure"))
    });
    s.run("symbol/pairing chain", || {
        if x2.s2().is_zero() {
            return Ok(Verdict::Skip("S² = 0".into()));
        }
        if !x2.is_maximal() {
            return Ok(Verdict::Skip("Ω² is not maximal".into()));
        }
        let m = v.dim();
        let count = (m * m).min(64);
        for k in 0..count {
            if !v.check_symbol_pairing(x2, &unit_vec(m * m, k))? {
                return Ok(Verdict::Fail(format!("mismatch on basis tensor {k}")));
            }
        }
        Ok(Verdict::Pass(format!("{count} basis tensors")))
    });
    if let (Family::Clifford(_), Some(g)) = (a.family(), &inst.gram) {
        s.run("Clifford gram invariance", || {
            let inv = clifford_invariance(a, g)?;
            Ok(Verdict::Info(format!("⟨e_i x, e_i y⟩ = d_i ⟨x, y⟩ per generator: {inv:?}")))
        });
    }
    s
}

pub fn run_suite(inst: &Instance) -> SuiteReport {
    let mut s = Suite::default();
    s.run("algebra axioms", || {
        Ok(match validate_algebra(&inst.algebra) {
            None => Verdict::Pass(format!("dim {}", inst.algebra.dim())),
            Some(v) => Verdict::Fail(v.to_string()),
        })
    });
    s.run("calculus", || {
        inst.calculus.validate()?;
        Ok(Verdict::Pass(format!("dim Ω¹ = {}", inst.calculus.dim_omega1())))
    });
    s.run("exterior algebra in degree 2", || {
        inst.exterior2.validate()?;
        Ok(Verdict::Pass(format!(
            "dim Ω² = {}, maximal: {}",
            inst.exterior2.omega2().dim(),
            inst.exterior2.is_maximal()
        )))
    });
    s.run("modules", || {
        for m in inst.modules.values() {
            m.validate_exhaustive()?;
        }
        Ok(Verdict::Pass(format!("{} modules", inst.modules.len())))
    });
    let (module_suites, fields) = rayon::join(
        || {
            use rayon::prelude::*;
            inst.modules
                .par_iter()
                .map(|(name, e)| module_suite(inst, name, e))
                .collect::<Vec<_>>()
        },
        || -> Result<Suite> {
            let v = vector_fields(&inst.calculus)?;
            let regular = inst.module(crate::instance::REGULAR_MODULE)?;
            let t = relation_tower(&inst.calculus, regular)?;
            Ok(field_suite(inst, &v, &t))
        },
    );
    for m in module_suites {
        s.extend(m);
    }
    match fields {
        Ok(f) => s.extend(f),
        Err(e) => s.run("vector fields", || Err(e)),
    }
    SuiteReport {
        passed: s.items.iter().all(|i| i.status != Status::Fail),
        checks: s.items,
    }
}

pub fn render(report: &SuiteReport, name: &str) -> String {
    let mut text = format!("{name}: invariant suite\n");
    for item in &report.checks {
        let tag = match item.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
            Status::Info => "info",
        };
        let _ = writeln!(text, "  [{tag}] {:<36}{}", item.name, item.detail);
    }
    let failed = report.checks.iter().filter(|i| i.status == Status::Fail).count();
    let _ = writeln!(
        text,
        "  {}",
        if failed == 0 {
            "all invariants hold".to_string()
        } else {
            format!("{failed} invariant(s) failed")
        }
    );
    text
}

pub fn to_json(report: &SuiteReport) -> Value {
    serde_json::to_value(report).expect("suite reports serialize")
}

/// Exit status contribution of a suite.
pub fn suite_error(report: &SuiteReport) -> Option<Error> {
    (!report.passed).then(|| Error::Consistency("invariant suite failed".into()))
}

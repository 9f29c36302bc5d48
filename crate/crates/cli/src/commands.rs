//! Subcommands. Each produces a JSON result and a text rendering of the
//! same data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ncjet_core::algebra::{format_combination, validate_algebra};
use ncjet_core::diffops::{operator_order, symbol, weak_diffop_space, Order, Symbol};
use ncjet_core::jets::{
    relation_tower, representability_defect, skeletal_jet, skeletal_symmetric_forms,
};
use ncjet_core::vectorfields::{
    asym, bracket_table, custom_projector, orthogonal_projector, skew_projector, vector_fields,
    ProjectorSpec, VectorFieldSpace,
};
use ncjet_core::{Error, Mat, Result, Scalar};
use serde_json::{json, Value};

use crate::instance::{mat_from_wire, mat_to_wire, to_wire, Instance, Q, REGULAR_MODULE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorChoice {
    Orthogonal,
    Skew,
    Custom(PathBuf),
}

impl FromStr for ProjectorChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "orthogonal" => Ok(ProjectorChoice::Orthogonal),
            "skew" => Ok(ProjectorChoice::Skew),
            _ => match s.strip_prefix("custom:") {
                Some(p) if !p.is_empty() => Ok(ProjectorChoice::Custom(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown projector '{s}'; expected orthogonal, skew or custom:<file>"
                )),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct Flags {
    pub modules: Vec<String>,
    pub order: Option<usize>,
    pub projector: ProjectorChoice,
    pub operator: Option<PathBuf>,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            modules: Vec::new(),
            order: None,
            projector: ProjectorChoice::Orthogonal,
            operator: None,
        }
    }
}

impl Flags {
    fn source(&self) -> &str {
        self.modules.first().map_or(REGULAR_MODULE, String::as_str)
    }

    fn target(&self) -> &str {
        self.modules.get(1).map_or(self.source(), String::as_str)
    }
}

pub struct Outcome {
    pub result: Value,
    pub text: String,
}

fn vector_json(v: &[Scalar]) -> Value {
    json!(to_wire(v))
}

fn mat_json(m: &Mat) -> Value {
    json!(mat_to_wire(m))
}

fn read_matrix(path: &Path, what: &str) -> Result<Mat> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {what} {}: {e}", path.display())))?;
    let rows: Vec<Vec<Q>> =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    mat_from_wire(&rows, what)
}

fn row(text: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(text, "  {key:<28}{value}");
}

pub fn validate(inst: &Instance) -> Result<Outcome> {
    if let Some(v) = validate_algebra(&inst.algebra) {
        return Err(Error::Validation(v.to_string()));
    }
    inst.calculus.validate()?;
    inst.exterior2.validate()?;
    for m in inst.modules.values() {
        m.validate_exhaustive()?;
    }
    let a = &inst.algebra;
    let c = &inst.calculus;
    let modules: serde_json::Map<String, Value> =
        inst.modules.iter().map(|(k, m)| (k.clone(), json!(m.dim()))).collect();
    let result = json!({
        "status": "ok",
        "algebra": {
            "dim": a.dim(),
            "commutative": a.is_commutative(),
            "family": format!("{:?}", a.family()),
        },
        "calculus": {
            "universal": c.is_universal(),
            "dim_omega1": c.dim_omega1(),
            "dim_n_d": c.n_d().dim(),
        },
        "exterior2": {
            "maximal": inst.exterior2.is_maximal(),
            "dim_omega2": inst.exterior2.omega2().dim(),
        },
        "modules": modules,
    });
    let mut text = format!("{}: valid\n", inst.name());
    row(&mut text, "algebra dim", a.dim());
    row(&mut text, "commutative", a.is_commutative());
    row(&mut text, "universal calculus", c.is_universal());
    row(&mut text, "dim Ω¹", c.dim_omega1());
    row(&mut text, "dim Ω²", inst.exterior2.omega2().dim());
    row(&mut text, "Ω² maximal", inst.exterior2.is_maximal());
    for (k, m) in &inst.modules {
        row(&mut text, &format!("module {k}"), format!("dim {}", m.dim()));
    }
    Ok(Outcome { result, text })
}

pub fn dims(inst: &Instance, flags: &Flags) -> Result<Outcome> {
    let name = flags.source();
    let e = inst.module(name)?;
    let c = &inst.calculus;
    let x2 = &inst.exterior2;
    let t = relation_tower(c, e)?;
    let opt = |r: Result<usize>| -> Result<Option<usize>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::Precondition(_)) => Ok(None),
            Err(other) => Err(other),
        }
    };
    let n: Vec<Option<usize>> = (0..=2)
        .map(|k| opt(t.relations(k).map(|s| s.dim())))
        .collect::<Result<_>>()?;
    let j: Vec<Option<usize>> = (0..=2)
        .map(|k| opt(skeletal_jet(&t, k).map(|j| j.dim())))
        .collect::<Result<_>>()?;
    let s: Vec<Option<usize>> = (1..=2)
        .map(|k| opt(skeletal_symmetric_forms(&t, k).map(|s| s.module.dim())))
        .collect::<Result<_>>()?;
    let defect = opt(representability_defect(&t, x2))?;
    let result = json!({
        "module": name,
        "dim_algebra": inst.algebra.dim(),
        "dim_module": e.dim(),
        "omega1": c.dim_omega1(),
        "omega1_tensor_omega1": c.t2().dim(),
        "omega2": x2.omega2().dim(),
        "s2": x2.s2().dim(),
        "s2_min": c.s2_min().dim(),
        "relations": n,
        "jets": j,
        "symmetric_forms": s,
        "defect": defect,
        "tor_ok": t.tor_ok(),
        "tor1": t.tor1_dim(),
    });
    let show = |v: Option<usize>| v.map_or_else(|| "n/a (relations do not descend)".into(), |d| d.to_string());
    let mut text = format!("{}: dimensions for E = {name}\n", inst.name());
    row(&mut text, "dim A", inst.algebra.dim());
    row(&mut text, "dim E", e.dim());
    row(&mut text, "Ω¹", c.dim_omega1());
    row(&mut text, "Ω¹ ⊗_A Ω¹", c.t2().dim());
    row(&mut text, "Ω²", x2.omega2().dim());
    row(&mut text, "S²", x2.s2().dim());
    row(&mut text, "S²_min", c.s2_min().dim());
    for k in 0..=2 {
        row(&mut text, &format!("N{}", superscript(k)), show(n[k]));
    }
    for k in 0..=2 {
        row(&mut text, &format!("𝕁{}E", superscript(k)), show(j[k]));
    }
    for k in 1..=2 {
        row(&mut text, &format!("𝕊{}E", superscript(k)), show(s[k - 1]));
    }
    row(&mut text, "representability defect", show(defect));
    row(&mut text, "prolonged relations descend", t.tor_ok());
    if let Some(tor) = t.tor1_dim() {
        row(&mut text, "dim Tor₁(Ω¹, E)", tor);
    }
    Ok(Outcome { result, text })
}

fn superscript(k: usize) -> char {
    ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'][k % 10]
}

pub fn diffops(inst: &Instance, flags: &Flags) -> Result<Outcome> {
    let (en, fnm) = (flags.source(), flags.target());
    let e = inst.module(en)?;
    let f = inst.module(fnm)?;
    let n = flags.order.unwrap_or(1);
    let t = relation_tower(&inst.calculus, e)?;
    let spaces = (0..=n)
        .map(|k| weak_diffop_space(&t, f, k))
        .collect::<Result<Vec<_>>>()?;
    let top = spaces.last().expect("orders start at 0");
    let basis: Vec<Value> = top.operators().iter().map(mat_json).collect();
    let result = json!({
        "source": en,
        "target": fnm,
        "order": n,
        "dims": spaces.iter().map(|s| s.dim()).collect::<Vec<_>>(),
        "map_space_dim": e.dim() * f.dim(),
        "basis": basis,
    });
    let mut text = format!(
        "{}: weak differential operators {en} → {fnm} up to order {n}\n",
        inst.name()
    );
    for (k, s) in spaces.iter().enumerate() {
        row(&mut text, &format!("order ≤ {k}"), format!("dim {}", s.dim()));
    }
    row(&mut text, "all linear maps", format!("dim {}", e.dim() * f.dim()));
    let _ = writeln!(text, "  basis of order ≤ {n}:");
    for (i, op) in top.operators().iter().enumerate() {
        let _ = writeln!(text, "    D{i} = {}", render_map(inst, op));
    }
    Ok(Outcome { result, text })
}

/// `[v₀, v₁, …]` with `vⱼ` the image of the j-th basis vector.
fn render_map(inst: &Instance, m: &Mat) -> String {
    let square = m.rows() == inst.algebra.dim() && m.cols() == inst.algebra.dim();
    let cols: Vec<String> = m
        .columns()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if square {
                format!("{} ↦ {}", inst.algebra.label(j), inst.algebra.format_element(c))
            } else {
                format!("v{j} ↦ {}", format_combination(c, |i| format!("w{i}")))
            }
        })
        .collect();
    cols.join(", ")
}

pub fn symbol_cmd(inst: &Instance, flags: &Flags) -> Result<Outcome> {
    let path = flags
        .operator
        .as_ref()
        .ok_or_else(|| Error::Parse("symbol needs --operator <file> with the map's matrix".into()))?;
    let op = read_matrix(path, "operator")?;
    let (en, fnm) = (flags.source(), flags.target());
    let e = inst.module(en)?;
    let f = inst.module(fnm)?;
    if op.shape() != (f.dim(), e.dim()) {
        return Err(Error::Validation(format!(
            "operator has shape {:?}, expected {}x{}",
            op.shape(),
            f.dim(),
            e.dim()
        )));
    }
    let t = relation_tower(&inst.calculus, e)?;
    let order = match operator_order(&t, f, &op, 2)? {
        Order::Exactly(k) => k,
        Order::ExceedsWindow => {
            return Err(Error::Precondition(
                "operator has order above 2; symbols are available up to order 2".into(),
            ))
        }
    };
    let sym = symbol(&t, f, &op, order)?;
    let mut text = format!("{}: operator {en} → {fnm} has order {order}\n", inst.name());
    let body = match &sym {
        Symbol::Order0(m) => {
            let _ = writeln!(text, "  symbol is the map itself: {}", render_map(inst, m));
            json!({ "map": mat_json(m) })
        }
        Symbol::Order1(m) => {
            let _ = writeln!(text, "  first-order symbol Ω¹ ⊗_A E → F, matrix:");
            write_matrix(&mut text, m);
            json!({ "map": mat_json(m) })
        }
        Symbol::Order2(s) => {
            let _ = writeln!(
                text,
                "  second-order symbol on S²_min(E) (dim {}), matrix:",
                s.domain.dim()
            );
            write_matrix(&mut text, &s.map);
            json!({
                "domain": s.domain.vectors().iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
                "map": mat_json(&s.map),
                "zero": s.is_zero(),
            })
        }
    };
    let result = json!({ "source": en, "target": fnm, "order": order, "symbol": body });
    Ok(Outcome { result, text })
}

fn write_matrix(text: &mut String, m: &Mat) {
    if m.cols() == 0 || m.rows() == 0 {
        let _ = writeln!(text, "    (empty, {}x{})", m.rows(), m.cols());
        return;
    }
    let cells: Vec<Vec<String>> = m
        .row_vecs()
        .iter()
        .map(|r| r.iter().map(Scalar::to_string).collect())
        .collect();
    let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
    for r in cells {
        let line: Vec<String> = r.iter().map(|s| format!("{s:>width$}")).collect();
        let _ = writeln!(text, "    [ {} ]", line.join(" "));
    }
}

fn field_label(i: usize) -> String {
    format!("X{i}")
}

fn render_fields(inst: &Instance, v: &VectorFieldSpace, text: &mut String) {
    for (i, x) in v.fields().iter().enumerate() {
        let _ = writeln!(text, "    {} = {}", field_label(i), render_map(inst, x));
    }
}

pub fn vector_fields_cmd(inst: &Instance) -> Result<Outcome> {
    let v = vector_fields(&inst.calculus)?;
    let m = v.module();
    let result = json!({
        "dim": v.dim(),
        "basis": v.fields().iter().map(mat_json).collect::<Vec<_>>(),
        "theta": v.thetas().iter().map(mat_json).collect::<Vec<_>>(),
        "left_action": m.left()?.iter().map(mat_json).collect::<Vec<_>>(),
        "right_action": m.right()?.iter().map(mat_json).collect::<Vec<_>>(),
    });
    let mut text = format!("{}: vector fields, dim {}\n", inst.name(), v.dim());
    render_fields(inst, &v, &mut text);
    let a = &inst.algebra;
    let _ = writeln!(text, "  actions of basis elements on the fields:");
    let render = |mm: &Mat| -> String {
        (0..v.dim())
            .map(|x| format_combination(&mm.col(x), field_label))
            .collect::<Vec<_>>()
            .join(", ")
    };
    for i in 0..a.dim() {
        let _ = writeln!(text, "    {}·X = [{}]", a.label(i), render(&m.left()?[i]));
        let _ = writeln!(text, "    X·{} = [{}]", a.label(i), render(&m.right()?[i]));
    }
    Ok(Outcome { result, text })
}

fn build_projector(inst: &Instance, v: &VectorFieldSpace, flags: &Flags) -> Result<(ProjectorSpec, &'static str)> {
    let ad = asym(v, &inst.exterior2)?;
    if !ad.maximal {
        return Err(Error::Precondition(
            "Ω² is not the maximal prolongation; bracket closure is not guaranteed".into(),
        ));
    }
    let (p, name) = match &flags.projector {
        ProjectorChoice::Orthogonal => {
            let g = inst.gram.as_ref().ok_or_else(|| {
                Error::Precondition("the orthogonal projector needs a gram in the instance".into())
            })?;
            (orthogonal_projector(v, &ad, g)?, "orthogonal")
        }
        ProjectorChoice::Skew => (skew_projector(v), "skew"),
        ProjectorChoice::Custom(path) => (custom_projector(read_matrix(path, "projector")?), "custom"),
    };
    p.validate(&ad).map_err(|e| match e {
        Error::Dimension(m) => Error::Validation(m),
        other => other,
    })?;
    Ok((p, name))
}

pub fn bracket_table_cmd(inst: &Instance, flags: &Flags) -> Result<Outcome> {
    let v = vector_fields(&inst.calculus)?;
    let (p, name) = build_projector(inst, &v, flags)?;
    let table = bracket_table(&v, &p);
    let cells: Vec<Vec<Value>> = table
        .iter()
        .map(|row| {
            row.iter()
                .map(|b| match &b.coords {
                    Some(c) => json!({ "coords": vector_json(c) }),
                    None => json!({ "coords": null, "map": mat_json(&b.value) }),
                })
                .collect()
        })
        .collect();
    let closed = table.iter().flatten().all(|b| b.coords.is_some());
    let result = json!({
        "projector": name,
        "dim": v.dim(),
        "basis": v.fields().iter().map(mat_json).collect::<Vec<_>>(),
        "table": cells,
        "closed": closed,
    });
    let mut text = format!("{}: bracket table under the {name} projector\n", inst.name());
    let _ = writeln!(text, "  basis:");
    render_fields(inst, &v, &mut text);
    let _ = writeln!(text, "  brackets:");
    for (i, row) in table.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            let rendered = match &b.coords {
                Some(c) => format_combination(c, field_label),
                None => format!("not a vector field: {}", render_map(inst, &b.value)),
            };
            let _ = writeln!(text, "    [X{i}, X{j}] = {rendered}");
        }
    }
    row(&mut text, "closed in 𝔛", closed);
    Ok(Outcome { result, text })
}

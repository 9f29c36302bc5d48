//! Instance files: the JSON schema and its translation into validated
//! core objects.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use ncjet_core::algebra::{clifford_algebra, group_algebra, matrix_algebra, truncated_polynomial, Family};
use ncjet_core::bimodule::{regular_bimodule, Bimodule};
use ncjet_core::calculus::{
    calculus_from_relations, exterior2_from_extra_relations, kahler_commutators,
    universal_calculus, zero_exterior2, Calculus, Exterior2,
};
use ncjet_core::vectorfields::{canonical_gram, GramFamily};
use ncjet_core::{Algebra, Error, Mat, Result, Scalar};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Wire scalar: a JSON integer or a `"p/q"` string. Floats are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Scalar);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

struct QVisitor;

impl Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q(Scalar::from_int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        v.to_string().parse().map(Q).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        Err(E::custom(format!(
            "floating-point literal {v} is not allowed; write an integer or a \"p/q\" string"
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        v.parse().map(Q).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

pub fn to_wire(v: &[Scalar]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

pub fn from_wire(v: &[Q]) -> Vec<Scalar> {
    v.iter().map(|q| q.0.clone()).collect()
}

pub fn mat_to_wire(m: &Mat) -> Vec<Vec<Q>> {
    m.row_vecs().iter().map(|r| to_wire(r)).collect()
}

pub fn mat_from_wire(rows: &[Vec<Q>], what: &str) -> Result<Mat> {
    let cols = rows.first().map_or(0, Vec::len);
    Mat::from_rows(cols, rows.iter().map(|r| from_wire(r)).collect())
        .map_err(|e| Error::Validation(format!("{what}: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// `constants[i][j][k]` is the coefficient of `e_k` in `e_i e_j`.
    StructureConstants {
        constants: Vec<Vec<Vec<Q>>>,
        unit: Vec<Q>,
    },
    Group(Vec<Vec<usize>>),
    Clifford(Vec<Q>),
    TruncatedPolynomial(usize),
    Matrix(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CalculusSpec {
    Universal,
    /// Generators of `N_d` as `A ⊗ A` coordinate vectors.
    Relations(Vec<Vec<Q>>),
    KahlerCommutators,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Exterior2Spec {
    #[default]
    Maximal,
    ExtraRelations(Vec<Vec<Q>>),
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramKeyword {
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GramSpec {
    Keyword(GramKeyword),
    Explicit(Vec<Vec<Q>>),
}

/// A left module by the matrices of the basis elements of `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub action: Vec<Vec<Vec<Q>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
    pub calculus: CalculusSpec,
    #[serde(default)]
    pub exterior2: Exterior2Spec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
}

/// The regular module is always available under this name.
pub const REGULAR_MODULE: &str = "A";

pub struct Instance {
    pub file: InstanceFile,
    pub algebra: Arc<Algebra>,
    pub calculus: Arc<Calculus>,
    pub exterior2: Exterior2,
    pub gram: Option<Mat>,
    pub modules: BTreeMap<String, Arc<Bimodule>>,
}

impl Instance {
    pub fn name(&self) -> &str {
        self.file.name.as_deref().unwrap_or("instance")
    }

    pub fn module(&self, name: &str) -> Result<&Arc<Bimodule>> {
        self.modules.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.modules.keys().map(String::as_str).collect();
            Error::Validation(format!("unknown module '{name}'; known: {}", known.join(", ")))
        })
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    build_instance(parse_instance(&text)?)
}

fn check_lengths(vs: &[Vec<Q>], want: usize, what: &str) -> Result<Vec<Vec<Scalar>>> {
    vs.iter()
        .enumerate()
        .map(|(k, v)| {
            if v.len() == want {
                Ok(from_wire(v))
            } else {
                Err(Error::Validation(format!(
                    "{what} {k} has {} coordinates, expected {want}",
                    v.len()
                )))
            }
        })
        .collect()
}

fn build_algebra(spec: &AlgebraSpec) -> Result<Algebra> {
    match spec {
        AlgebraSpec::StructureConstants { constants, unit } => Algebra::from_structure_constants(
            constants
                .iter()
                .map(|row| row.iter().map(|v| from_wire(v)).collect())
                .collect(),
            from_wire(unit),
        ),
        AlgebraSpec::Group(table) => group_algebra(table),
        AlgebraSpec::Clifford(d) => clifford_algebra(&from_wire(d)),
        AlgebraSpec::TruncatedPolynomial(n) => truncated_polynomial(*n),
        AlgebraSpec::Matrix(k) => matrix_algebra(*k),
    }
}

fn build_module(a: &Arc<Algebra>, name: &str, spec: &ModuleSpec) -> Result<Bimodule> {
    if spec.action.len() != a.dim() {
        return Err(Error::Validation(format!(
            "module '{name}' gives {} action matrices, expected {}",
            spec.action.len(),
            a.dim()
        )));
    }
    let mats = spec
        .action
        .iter()
        .map(|m| mat_from_wire(m, &format!("module '{name}'")))
        .collect::<Result<Vec<Mat>>>()?;
    let dim = mats.first().map_or(0, Mat::rows);
    if let Some(m) = mats.iter().find(|m| m.shape() != (dim, dim)) {
        return Err(Error::Validation(format!(
            "module '{name}': action matrix has shape {:?}, expected {dim}x{dim}",
            m.shape()
        )));
    }
    Bimodule::new(a.clone(), dim, Some(mats), None)
        .map_err(|e| Error::Validation(format!("module '{name}': {e}")))
}

pub fn build_instance(file: InstanceFile) -> Result<Instance> {
    let algebra = Arc::new(build_algebra(&file.algebra)?);
    let n = algebra.dim();
    let calculus = Arc::new(match &file.calculus {
        CalculusSpec::Universal => universal_calculus(&algebra)?,
        CalculusSpec::Relations(gens) => {
            calculus_from_relations(&algebra, &check_lengths(gens, n * n, "relation")?)?
        }
        CalculusSpec::KahlerCommutators => {
            calculus_from_relations(&algebra, &kahler_commutators(&algebra))?
        }
    });
    let exterior2 = match &file.exterior2 {
        Exterior2Spec::Maximal => exterior2_from_extra_relations(&calculus, &[])?,
        Exterior2Spec::ExtraRelations(extra) => {
            let t2 = calculus.t2().dim();
            exterior2_from_extra_relations(&calculus, &check_lengths(extra, t2, "extra relation")?)?
        }
        Exterior2Spec::Zero => zero_exterior2(&calculus)?,
    };
    let gram = match &file.gram {
        None => None,
        Some(GramSpec::Keyword(GramKeyword::Canonical)) => {
            let family = match algebra.family() {
                Family::Group => GramFamily::Group,
                Family::Clifford(_) => GramFamily::Clifford,
                _ => {
                    return Err(Error::Validation(
                        "a canonical gram exists only for group and Clifford algebras".into(),
                    ))
                }
            };
            Some(canonical_gram(&algebra, family)?)
        }
        Some(GramSpec::Explicit(rows)) => {
            let g = mat_from_wire(rows, "gram")?;
            if g.shape() != (n, n) {
                return Err(Error::Validation(format!(
                    "gram has shape {:?}, expected {n}x{n}",
                    g.shape()
                )));
            }
            if !g.is_symmetric() || !g.leading_minors().iter().all(Scalar::is_positive) {
                return Err(Error::Validation("gram is not symmetric positive definite".into()));
            }
            Some(g)
        }
    };
    let mut modules = BTreeMap::new();
    modules.insert(
        REGULAR_MODULE.to_string(),
        Arc::new(regular_bimodule(&algebra).forget_right()),
    );
    for (name, spec) in &file.modules {
        if name == REGULAR_MODULE {
            return Err(Error::Validation(format!(
                "module name '{REGULAR_MODULE}' is reserved for the regular module"
            )));
        }
        modules.insert(name.clone(), Arc::new(build_module(&algebra, name, spec)?));
    }
    Ok(Instance {
        file,
        algebra,
        calculus,
        exterior2,
        gram,
        modules,
    })
}

//! Weak linear differential operators, their jet lifts, composition and
//! symbols.

use std::sync::Arc;

use crate::bimodule::{tensor_a, Bimodule, TensorA};
use crate::error::{Error, Result};
use crate::exactla::{kernel, unit_vec, vec_is_zero, Mat, Scalar, Solver, Subspace};
use crate::jets::{skeletal_jet, RelationTower, SkeletalJet};

/// A subspace of `Hom_𝕜(E, F)`, maps flattened row-major.
#[derive(Clone, Debug)]
pub struct OperatorSpace {
    pub source: Arc<Bimodule>,
    pub target: Arc<Bimodule>,
    pub order: usize,
    pub basis: Subspace,
}

impl OperatorSpace {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn contains(&self, op: &Mat) -> bool {
        op.shape() == (self.target.dim(), self.source.dim()) && self.basis.contains(&op.to_vec())
    }

    pub fn operators(&self) -> Vec<Mat> {
        self.basis
            .vectors()
            .into_iter()
            .map(|v| Mat::from_vec(self.target.dim(), self.source.dim(), v))
            .collect()
    }
}

fn check_shape(t: &RelationTower, f: &Bimodule, op: &Mat) -> Result<()> {
    let want = (f.dim(), t.module().dim());
    if op.shape() != want {
        return Err(Error::Dimension(format!(
            "operator has shape {:?}, expected {}x{}",
            op.shape(),
            want.0,
            want.1
        )));
    }
    Ok(())
}

/// `a ⊗ e ↦ aΔ(e)` on `A ⊗ E`.
pub fn jet_map(t: &RelationTower, f: &Bimodule, op: &Mat) -> Result<Mat> {
    check_shape(t, f, op)?;
    let lf = f.left()?;
    let de = t.module().dim();
    let n = lf.len();
    let mut cols = Vec::with_capacity(n * de);
    for l in lf {
        let composed = l * op;
        for e in 0..de {
            cols.push(composed.col(e));
        }
    }
    Ok(Mat::from_columns(f.dim(), &cols))
}

/// The linear conditions `Σ aᵢΔ(eᵢ) = 0` for `Σ aᵢ ⊗ eᵢ` ranging over a
/// basis of `Nⁿ(E)`, as rows acting on the flattened `Δ`.
fn order_constraints(t: &RelationTower, f: &Bimodule, n: usize) -> Result<Mat> {
    let rel = t.relations(n)?;
    let lf = f.left()?;
    let de = t.module().dim();
    let df = f.dim();
    let cols = df * de;
    let mut rows = Vec::with_capacity(rel.dim() * df);
    for w in rel.vectors() {
        // Σ_{a,e} w[a,e] L_F[a][r, k] Δ[k, e]
        let mut block = vec![vec![Scalar::zero(); cols]; df];
        for (idx, c) in w.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, e) = (idx / de, idx % de);
            for (r, row) in block.iter_mut().enumerate() {
                for k in 0..df {
                    let x = lf[a].get(r, k);
                    if !x.is_zero() {
                        row[k * de + e].add_mul(c, x);
                    }
                }
            }
        }
        rows.extend(block);
    }
    Mat::from_rows(cols, rows)
}

pub fn weak_diffop_space(t: &RelationTower, f: &Arc<Bimodule>, n: usize) -> Result<OperatorSpace> {
    let c = order_constraints(t, f, n)?;
    let basis = if c.rows() == 0 {
        Subspace::full(c.cols())
    } else {
        kernel(&c)
    };
    Ok(OperatorSpace {
        source: t.module().clone(),
        target: f.clone(),
        order: n,
        basis,
    })
}

/// Whether `Σ aᵢΔ(eᵢ)` vanishes on `Nⁿ(E)`.
pub fn is_weak_operator(t: &RelationTower, f: &Bimodule, op: &Mat, n: usize) -> Result<bool> {
    let m = jet_map(t, f, op)?;
    Ok(t
        .relations(n)?
        .vectors()
        .iter()
        .all(|w| vec_is_zero(&m.mul_vec(w))))
}

/// The unique left-linear `Δ̃ : 𝕁ⁿE → F` with `Δ̃ ∘ prolong = Δ`.
pub fn lift_to_skeletal(t: &RelationTower, jet: &SkeletalJet, f: &Bimodule, op: &Mat) -> Result<Mat> {
    let m = jet_map(t, f, op)?;
    let n = jet.order();
    for w in t.relations(n)?.vectors() {
        if !vec_is_zero(&m.mul_vec(&w)) {
            return Err(Error::Precondition(format!(
                "operator is not of order {n}: it does not factor through the {n}-jet"
            )));
        }
    }
    Ok(&m * &jet.p_hat().section)
}

/// `Δ₂ ∘ Δ₁`, checked to be an operator of order `order` on `E`.
pub fn compose(t_e: &RelationTower, g: &Bimodule, d2: &Mat, d1: &Mat, order: usize) -> Result<Mat> {
    if d2.cols() != d1.rows() {
        return Err(Error::Dimension(format!(
            "cannot compose {}x{} after {}x{}",
            d2.rows(),
            d2.cols(),
            d1.rows(),
            d1.cols()
        )));
    }
    let comp = d2 * d1;
    if !is_weak_operator(t_e, g, &comp, order)? {
        return Err(Error::Precondition(format!(
            "composition is not an operator of order {order}"
        )));
    }
    Ok(comp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Order {
    Exactly(usize),
    ExceedsWindow,
}

pub fn operator_order(t: &RelationTower, f: &Bimodule, op: &Mat, max_n: usize) -> Result<Order> {
    for n in 0..=max_n {
        if is_weak_operator(t, f, op, n)? {
            return Ok(Order::Exactly(n));
        }
    }
    Ok(Order::ExceedsWindow)
}

/// The second-order symbol: a left-linear map `S²_min(E) → F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol2 {
    /// `S²_min(E) ⊆ Ω¹ ⊗_A Ω¹ ⊗_A E`.
    pub domain: Subspace,
    /// `dim F × dim S²_min(E)`, in the canonical basis of `domain`.
    pub map: Mat,
}

impl Symbol2 {
    pub fn is_zero(&self) -> bool {
        self.map.is_zero()
    }

    /// Value on an element of `S²_min(E)`.
    pub fn evaluate(&self, sigma: &[Scalar]) -> Result<Vec<Scalar>> {
        let c = self.domain.coords(sigma).ok_or_else(|| {
            Error::Precondition("form is not a prolonged relation".into())
        })?;
        Ok(self.map.mul_vec(&c))
    }
}

/// `σ ↦ Δ̃(χ(w))` for any `w` with `−ψ(w) = σ`.
pub fn symbol2(t: &RelationTower, f: &Bimodule, op: &Mat) -> Result<Symbol2> {
    t.require_tor_ok()?;
    if !is_weak_operator(t, f, op, 2)? {
        return Err(Error::Precondition("operator is not of order 2".into()));
    }
    let domain = t.s2_min_e()?;
    if domain.is_zero() {
        return Ok(Symbol2 {
            domain,
            map: Mat::zeros(f.dim(), 0),
        });
    }
    let m = jet_map(t, f, op)?;
    let solver = Solver::new(t.psi());
    let cols: Result<Vec<Vec<Scalar>>> = domain
        .vectors()
        .iter()
        .map(|sigma| {
            let neg: Vec<Scalar> = sigma.iter().map(|x| -x).collect();
            let w = solver
                .solve(&neg)
                .ok_or_else(|| Error::Consistency("form outside the image of ψ".into()))?;
            Ok(m.mul_vec(&t.chi().mul_vec(&w)))
        })
        .collect();
    Ok(Symbol2 {
        domain,
        map: Mat::from_columns(f.dim(), &cols?),
    })
}

/// `Ω¹ ⊗_A E` with the maps used by the first-order symbol.
#[derive(Clone, Debug)]
pub struct FirstOrderForms {
    pub tensor: TensorA,
    /// `κ′ : A ⊗ A ⊗ E → Ω¹ ⊗_A E`, `a ⊗ b ⊗ e ↦ a·db ⊗ e`.
    kappa: Mat,
    /// `χ₀ : A ⊗ A ⊗ E → A ⊗ E`, `a ⊗ b ⊗ e ↦ a ⊗ be − ab ⊗ e`.
    chi0: Mat,
}

pub fn first_order_forms(t: &RelationTower) -> Result<FirstOrderForms> {
    let c = t.calculus();
    let e = t.module();
    let a = c.algebra();
    let n = a.dim();
    let de = e.dim();
    let le = e.left()?;
    let tensor = tensor_a(c.omega1(), e)?;
    let rho = c.rho();
    let mut kappa_cols = Vec::with_capacity(n * n * de);
    let mut chi0_cols = Vec::with_capacity(n * n * de);
    for ai in 0..n {
        for bi in 0..n {
            let rho_ab = rho.col(ai * n + bi);
            let ab = a.basis_product(ai, bi);
            for ei in 0..de {
                kappa_cols.push(tensor.class_of(&rho_ab, &unit_vec(de, ei)));
                let mut col = vec![Scalar::zero(); n * de];
                for (f, x) in le[bi].col(ei).into_iter().enumerate() {
                    col[ai * de + f] += x;
                }
                for (k, x) in ab.iter().enumerate() {
                    col[k * de + ei] -= x;
                }
                chi0_cols.push(col);
            }
        }
    }
    Ok(FirstOrderForms {
        kappa: Mat::from_columns(tensor.dim(), &kappa_cols),
        chi0: Mat::from_columns(n * de, &chi0_cols),
        tensor,
    })
}

/// The first-order symbol `Ω¹ ⊗_A E → F`.
pub fn symbol1(t: &RelationTower, forms: &FirstOrderForms, f: &Bimodule, op: &Mat) -> Result<Mat> {
    if !is_weak_operator(t, f, op, 1)? {
        return Err(Error::Precondition("operator is not of order 1".into()));
    }
    let m = &jet_map(t, f, op)? * &forms.chi0;
    for v in kernel(&forms.kappa).vectors() {
        if !vec_is_zero(&m.mul_vec(&v)) {
            return Err(Error::Consistency(
                "first-order symbol is not well defined".into(),
            ));
        }
    }
    let solver = Solver::new(&forms.kappa);
    let dim = forms.tensor.dim();
    let cols: Result<Vec<Vec<Scalar>>> = (0..dim)
        .map(|k| {
            let v = solver
                .solve(&unit_vec(dim, k))
                .ok_or_else(|| Error::Consistency("κ′ is not surjective".into()))?;
            Ok(m.mul_vec(&v))
        })
        .collect();
    Ok(Mat::from_columns(f.dim(), &cols?))
}

/// Whether `∇ : E → Ω¹ ⊗_A E` has first-order symbol equal to the identity.
pub fn is_connection(t: &RelationTower, forms: &FirstOrderForms, nabla: &Mat) -> Result<bool> {
    let target = &forms.tensor.module;
    let sym = symbol1(t, forms, target, nabla)?;
    Ok(sym.is_identity())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// An order-0 operator is its own symbol.
    Order0(Mat),
    Order1(Mat),
    Order2(Symbol2),
}

pub fn symbol(t: &RelationTower, f: &Bimodule, op: &Mat, n: usize) -> Result<Symbol> {
    match n {
        0 => {
            if !is_weak_operator(t, f, op, 0)? {
                return Err(Error::Precondition("operator is not of order 0".into()));
            }
            Ok(Symbol::Order0(op.clone()))
        }
        1 => Ok(Symbol::Order1(symbol1(t, &first_order_forms(t)?, f, op)?)),
        2 => Ok(Symbol::Order2(symbol2(t, f, op)?)),
        _ => Err(Error::Precondition(format!(
            "symbols are available up to order 2, not {n}"
        ))),
    }
}

/// Symbol of `Δ₂ ∘ Δ₁` for `Δ₁ : E → F` of order `n` and `Δ₂ : F → G` of
/// order `m`. Independence of the representatives is spot-checked by
/// adding a lower-order operator to each and recomputing.
pub fn symbol_compose(
    t_e: &RelationTower,
    t_f: &RelationTower,
    g: &Arc<Bimodule>,
    (d2, m): (&Mat, usize),
    (d1, n): (&Mat, usize),
) -> Result<Symbol> {
    let order = n + m;
    if order > 2 {
        return Err(Error::Precondition(format!(
            "composed order {order} exceeds the supported window of 2"
        )));
    }
    let f = t_f.module();
    let comp = compose(t_e, g, d2, d1, order)?;
    let sym = symbol(t_e, g, &comp, order)?;
    if n > 0 {
        let lower = weak_diffop_space(t_e, f, n - 1)?;
        if let Some(p) = lower.operators().into_iter().last() {
            let perturbed = d2 * &(d1 + &p);
            if symbol(t_e, g, &perturbed, order)? != sym {
                return Err(Error::Consistency(
                    "symbol depends on the representative of the first factor".into(),
                ));
            }
        }
    }
    if m > 0 {
        let lower = weak_diffop_space(t_f, g, m - 1)?;
        if let Some(p) = lower.operators().into_iter().last() {
            let perturbed = &(d2 + &p) * d1;
            if symbol(t_e, g, &perturbed, order)? != sym {
                return Err(Error::Consistency(
                    "symbol depends on the representative of the second factor".into(),
                ));
            }
        }
    }
    Ok(sym)
}

/// Lift of `Δ` to the `n`-jet, building the jet on the way.
pub fn lift(t: &RelationTower, f: &Bimodule, op: &Mat, n: usize) -> Result<(SkeletalJet, Mat)> {
    let jet = skeletal_jet(t, n)?;
    let l = lift_to_skeletal(t, &jet, f, op)?;
    Ok((jet, l))
}

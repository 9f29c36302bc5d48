use std::sync::Arc;

use ncjet_core::algebra::{cyclic_table, group_algebra, truncated_polynomial};
use ncjet_core::bimodule::{hom_left_linear, regular_bimodule, right_unitor, Bimodule};
use ncjet_core::calculus::{
    calculus_from_relations, kahler_commutators, universal_calculus, Calculus,
};
use ncjet_core::diffops::{
    compose, first_order_forms, is_connection, jet_map, lift, operator_order, symbol, symbol2,
    symbol_compose, weak_diffop_space, Order, Symbol,
};
use ncjet_core::exactla::{Mat, Scalar};
use ncjet_core::jets::{relation_tower, RelationTower};

struct Setup {
    calculus: Arc<Calculus>,
    tower: RelationTower,
    module: Arc<Bimodule>,
}

fn kahler(n: usize) -> Setup {
    let a = Arc::new(truncated_polynomial(n).unwrap());
    let calculus = Arc::new(calculus_from_relations(&a, &kahler_commutators(&a)).unwrap());
    let module = Arc::new(regular_bimodule(&a).forget_right());
    let tower = relation_tower(&calculus, &module).unwrap();
    Setup {
        calculus,
        tower,
        module,
    }
}

/// `x^k ↦ k x^{k-1+shift}`.
fn x_pow_d(n: usize, shift: usize) -> Mat {
    Mat::from_fn(n, n, |r, k| {
        if k >= 1 && k - 1 + shift == r {
            Scalar::from_int(k as i64)
        } else {
            Scalar::zero()
        }
    })
}

#[test]
fn lift_of_x_d_is_unique() {
    let s = kahler(3);
    let xd = x_pow_d(3, 1);
    let (jet, l) = lift(&s.tower, &s.module, &xd, 1).unwrap();
    let p = &jet.p_hat().projection;
    // every solution L' of L'·p̂ = a⊗e ↦ aΔ(e) differs from L by a map killing im p̂
    assert_eq!(&l * p, jet_map(&s.tower, &s.module, &xd).unwrap());
    assert_eq!(p.rank(), jet.dim());
    assert_eq!(&l * jet.prolong(), xd);
}

#[test]
fn compositions_keep_their_order() {
    let s = kahler(3);
    let a = s.calculus.algebra();
    let (ra, rb) = (a.right_mul(1), a.right_mul(2));
    let both = compose(&s.tower, &s.module, ra, rb, 0).unwrap();
    assert_eq!(both, ra * rb);
    let omega = Arc::new(s.calculus.omega1().forget_right());
    let d_ra = compose(&s.tower, &omega, s.calculus.d(), ra, 1).unwrap();
    assert_eq!(d_ra, s.calculus.d() * ra);
    let xd = x_pow_d(3, 1);
    assert!(compose(&s.tower, &s.module, &xd, &xd, 1).is_err());
    assert!(compose(&s.tower, &s.module, &xd, &xd, 2).is_ok());
}

#[test]
fn operator_orders() {
    let s = kahler(3);
    let zero = Mat::zeros(3, 3);
    assert_eq!(
        operator_order(&s.tower, &s.module, &zero, 2).unwrap(),
        Order::Exactly(0)
    );
    let omega = Arc::new(s.calculus.omega1().forget_right());
    assert_eq!(
        operator_order(&s.tower, &omega, s.calculus.d(), 2).unwrap(),
        Order::Exactly(1)
    );
    let xd = x_pow_d(3, 1);
    assert_eq!(
        operator_order(&s.tower, &s.module, &(&xd * &xd), 2).unwrap(),
        Order::Exactly(2)
    );
    let s4 = kahler(4);
    let d = x_pow_d(4, 0);
    let d3 = &(&d * &d) * &d;
    assert_eq!(
        operator_order(&s4.tower, &s4.module, &d3, 2).unwrap(),
        Order::ExceedsWindow
    );
}

#[test]
fn second_order_symbols() {
    let s = kahler(3);
    for op in weak_diffop_space(&s.tower, &s.module, 1)
        .unwrap()
        .operators()
    {
        assert!(symbol2(&s.tower, &s.module, &op).unwrap().is_zero());
    }
    let xd = x_pow_d(3, 1);
    assert!(!symbol2(&s.tower, &s.module, &(&xd * &xd))
        .unwrap()
        .is_zero());

    // on Q[x]/(x^5) the class of dx ⊗ dx · x² pairs with (x∂)² to a multiple of x⁴
    let s5 = kahler(5);
    let c = &s5.calculus;
    let dx = c.d().col(1);
    let x2 = c.algebra().basis(2);
    let dx_x2 = c.omega1().right_by(&x2).unwrap().mul_vec(&dx);
    let sigma = c.t2().class_of(&dx, &dx_x2);
    let (_, iso) = right_unitor(&c.t2().module).unwrap();
    let sigma_e = iso.mul_vec(&sigma);
    let xd5 = x_pow_d(5, 1);
    let sym = symbol2(&s5.tower, &s5.module, &(&xd5 * &xd5)).unwrap();
    let value = sym.evaluate(&sigma_e).unwrap();
    assert!(value[..4].iter().all(Scalar::is_zero));
    assert!(!value[4].is_zero());
}

#[test]
fn universal_symbols_are_empty() {
    let a = Arc::new(group_algebra(&cyclic_table(2)).unwrap());
    let u = Arc::new(universal_calculus(&a).unwrap());
    let e = Arc::new(regular_bimodule(&a).forget_right());
    let t = relation_tower(&u, &e).unwrap();
    let d1 = weak_diffop_space(&t, &e, 1).unwrap();
    let d2 = weak_diffop_space(&t, &e, 2).unwrap();
    assert_eq!(d1.basis, d2.basis);
    for op in d2.operators() {
        let s = symbol2(&t, &e, &op).unwrap();
        assert_eq!(s.map.cols(), 0);
    }
}

#[test]
fn symbol_of_compositions() {
    let s = kahler(3);
    let (t, e) = (&s.tower, &s.module);
    let a = s.calculus.algebra();
    let (ra, rb) = (a.right_mul(1), a.right_mul(2));
    assert_eq!(
        symbol_compose(t, t, e, (ra, 0), (rb, 0)).unwrap(),
        Symbol::Order0(ra * rb)
    );
    let xd = x_pow_d(3, 1);
    let x2d = x_pow_d(3, 2);
    let id = Mat::identity(3);
    assert_eq!(
        symbol_compose(t, t, e, (&xd, 1), (&id, 0)).unwrap(),
        symbol(t, e, &xd, 1).unwrap()
    );
    assert_eq!(
        symbol_compose(t, t, e, (&x2d, 1), (&xd, 1)).unwrap(),
        symbol(t, e, &(&x2d * &xd), 2).unwrap()
    );
}

#[test]
fn connections_on_the_algebra() {
    let s = kahler(3);
    let forms = first_order_forms(&s.tower).unwrap();
    let (_, iso) = right_unitor(s.calculus.omega1()).unwrap();
    let nabla = &iso * s.calculus.d();
    assert!(is_connection(&s.tower, &forms, &nabla).unwrap());
    let target = &forms.tensor.module;
    let linear = hom_left_linear(&s.module, target).unwrap();
    assert!(!linear.is_zero());
    for v in linear.vectors() {
        let theta = Mat::from_vec(target.dim(), 3, v);
        assert!(is_connection(&s.tower, &forms, &(&nabla + &theta)).unwrap());
    }
    assert!(!is_connection(&s.tower, &forms, &Mat::zeros(nabla.rows(), 3)).unwrap());
}

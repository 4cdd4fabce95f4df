//! Smith normal form of an integer matrix, with its unimodular transforms.

use pexp::lattice::{smith_normal_form, IntMatrix};

fn main() {
    let a = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
    let s = smith_normal_form(&a);
    println!("A = {a:?}");
    println!("D = {:?}", s.d);
    println!("invariant factors: {:?}", s.invariant_factors());
    assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    println!("U A V = D checked");
}

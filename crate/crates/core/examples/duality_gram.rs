//! Pairing matrix against orbit closures and the dual basis it determines.

use pexp::corpus;
use pexp::ktheory::KContext;
use pexp::lattice::Character;
use pexp::laurent::LaurentPoly;
use pexp::pexp::PExpFun;

fn main() {
    let fan = corpus::p112();
    let ctx = KContext::new(&fan).unwrap();
    let om = |c: &[i64]| LaurentPoly::one_minus(&Character::from_i64(c));
    let zero = LaurentPoly::zero(2);
    let f = |v: Vec<LaurentPoly>| PExpFun::try_new(&fan, v).unwrap().unwrap();
    let basis = vec![
        PExpFun::one(&fan),
        f(vec![zero.clone(), om(&[0, 1]), om(&[2, 0])]),
        f(vec![zero.clone(), zero.clone(), &om(&[1, 0]) * &om(&[-2, 1])]),
    ];
    // the whole space, a divisor, a fixed point
    let taus = vec![vec![], vec![2], vec![0, 2]];

    let gram = ctx.gram_matrix(&basis, &taus).unwrap();
    for (label, row) in gram.row_labels.iter().zip(&gram.entries) {
        let row: Vec<String> = row.iter().map(ToString::to_string).collect();
        println!("{label}: {}", row.join(" | "));
    }
    println!("shape {}, determinant {}", gram.shape(), gram.determinant().unwrap());

    let duals = ctx.dual_basis_solve(&taus, &basis).unwrap();
    for (j, g) in duals.iter().enumerate() {
        let vals: Vec<String> = g.values().iter().map(ToString::to_string).collect();
        println!("dual to {:?}: ({})", taus[j], vals.join(", "));
    }
    println!("Gram of the duals: {}", ctx.gram_matrix(&duals, &taus).unwrap().shape());
}

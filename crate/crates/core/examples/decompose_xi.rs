//! Coefficients of a function on P(1,1,2) in a family of three functions,
//! solved exactly over the Laurent ring.

use pexp::corpus;
use pexp::ktheory::{combine, decompose, KContext};
use pexp::laurent::LaurentPoly;
use pexp::lattice::Character;
use pexp::pexp::PExpFun;

fn main() {
    let fan = corpus::p112();
    let lp = |t: &[(i64, &[i64])]| LaurentPoly::from_terms(2, t);
    let om = |c: &[i64]| LaurentPoly::one_minus(&Character::from_i64(c));
    let f = |v: Vec<LaurentPoly>| PExpFun::try_new(&fan, v).unwrap().unwrap();

    let xi = f(vec![
        lp(&[(1, &[1, 0]), (1, &[0, 1])]),
        lp(&[(1, &[0, 0]), (1, &[1, -1])]),
        lp(&[(1, &[-2, 1]), (1, &[-1, 0])]),
    ]);
    let zero = LaurentPoly::zero(2);
    let basis = vec![
        PExpFun::one(&fan),
        f(vec![zero.clone(), om(&[0, 1]), om(&[2, 0])]),
        f(vec![zero.clone(), &om(&[0, 1]) * &om(&[-2, 1]), zero.clone()]),
    ];
    let c = decompose(&xi, &basis).unwrap();
    for (i, x) in c.iter().enumerate() {
        println!("c{i} = {x}");
    }
    assert_eq!(combine(&fan, &c, &basis).unwrap(), xi);
    println!("re-expansion matches; chi = {}", KContext::new(&fan).unwrap().chi(&xi).unwrap());
}

//! Euler characteristics of `O(d)` on the projective plane count the lattice
//! points of the dilated simplex.

use pexp::corpus;
use pexp::ktheory::KContext;
use pexp::lattice::Character;
use pexp::pexp::{CartierData, PExpFun};

fn main() {
    let fan = corpus::p2();
    let ctx = KContext::new(&fan).unwrap();
    for d in 0..=4 {
        let data = CartierData::new(vec![
            Character::from_i64(&[0, 0]),
            Character::from_i64(&[d, 0]),
            Character::from_i64(&[0, d]),
        ]);
        let f = PExpFun::from_cartier(&fan, &data).unwrap();
        let chi = ctx.chi(&f).unwrap();
        println!("d = {d}: {} lattice points, chi = {chi}", chi.augment());
    }
}

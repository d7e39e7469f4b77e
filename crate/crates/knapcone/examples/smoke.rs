use knapcone::matrix::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use num_integer::Integer;
use num_traits::ToPrimitive;

fn main() {
    let others = [13429u64, 26855, 40280, 40281, 53711, 53714, 67141];
    let a = 26850u64;
    let n = others.len() + 1;
    for (dn, dd) in [(51i64,100i64),(3,4),(9,10),(99,100),(999,1000)] {
        let mut data = vec![BigInt::from(0); n * n];
        data[0] = BigInt::from(1);
        for (j, &o) in others.iter().enumerate() { data[1 + j] = BigInt::from(o) * 100; }
        for j in 0..others.len() { data[(j + 1) * n + (j + 1)] = BigInt::from(a) * 100; }
        let b = IntMatrix::new(n, n, data);
        let delta = BigRational::new(BigInt::from(dn), BigInt::from(dd));
        let red = knapcone::lattice::lll_reduce(&b, &delta).unwrap();
        let mut ks: Vec<u64> = (0..n).map(|i| {
            let k = red.basis[(i,0)].abs().mod_floor(&BigInt::from(a)).to_u64().unwrap();
            k.min(a - k)
        }).filter(|&k| k != 0).collect();
        ks.sort_unstable(); ks.dedup();
        println!("delta {dn}/{dd}: {:?} has2447={}", ks, ks.contains(&2447));
    }
}

use conical_harvest::special::{faddeeva_w, Complex};

#[test]
fn faddeeva_matches_high_precision_reference() {
    let data = include_str!("data/faddeeva_reference.csv");
    let mut worst = (0.0f64, 0.0, 0.0);
    let mut count = 0;
    for line in data.lines().skip(2) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let z = Complex::new(v[0], v[1]);
        let reference = Complex::new(v[2], v[3]);
        let w = faddeeva_w(z);
        let rel = (w - reference).norm() / reference.norm();
        if rel > worst.0 {
            worst = (rel, v[0], v[1]);
        }
        count += 1;
    }
    eprintln!("worst relative error {:e} at {} + {}i over {count} points", worst.0, worst.1, worst.2);
    assert!(count > 1000);
    assert!(worst.0 <= 1e-13, "worst relative error {:e} at z = {} + {}i", worst.0, worst.1, worst.2);
}

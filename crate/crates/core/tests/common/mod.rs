#![allow(dead_code)]

use expectile_el::model::Dataset;
use expectile_el::numkit::{draw_exponential, draw_normal, Matrix, RngStream};

/// Random regression data with an intercept column, shifted-exponential noise
/// and each response missing with probability `miss`.
pub fn random_dataset(seed: u64, n: usize, p: usize, miss: f64) -> (Dataset<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, 7);
    let beta: Vec<f64> = (0..p).map(|j| if j % 2 == 0 { 1.0 } else { -0.5 }).collect();
    let mut x = Vec::with_capacity(n * p);
    let mut y = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p)
            .map(|j| if j == 0 { 1.0 } else { draw_normal(&mut rng) })
            .collect();
        let mean: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let e = draw_exponential(&mut rng, 1.0) - 1.0;
        let d = !rng.bernoulli(miss);
        x.extend(row);
        y.push(d.then_some(mean + e));
        delta.push(d);
    }
    (Dataset::new(Matrix::from_vec(n, p, x).unwrap(), y, delta).unwrap(), beta)
}

pub fn permuted(ds: &Dataset<f64>, seed: u64) -> Dataset<f64> {
    let mut idx: Vec<usize> = (0..ds.n()).collect();
    let mut rng = RngStream::new(seed, 99);
    for i in (1..idx.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    ds.select_rows(&idx).unwrap()
}

pub fn scaled(ds: &Dataset<f64>, c: f64) -> Dataset<f64> {
    let data: Vec<f64> = ds.x().as_slice().iter().map(|v| v * c).collect();
    let x = Matrix::from_vec(ds.n(), ds.p(), data).unwrap();
    let delta = (0..ds.n()).map(|i| ds.delta(i)).collect();
    Dataset::new(x, ds.responses().to_vec(), delta).unwrap()
}

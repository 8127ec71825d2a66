//! Synthetic fixture shared by the CLI and acceptance tests.
//!
//! Row `i` is `g(i)·u + noise` with `u` a random ±1 sign vector, noise
//! standard normal and `g` strictly increasing, so embedding magnitude grows
//! with the row index. MOS is the row index. The prompts straddle a random
//! shared direction `w` along `±u`, so the similarity gap also tracks `g`.
//!
//! A sign vector (rather than a Gaussian `u`) matters: with Gaussian `u` the
//! absolute profile stays half-normal at every `g` and the magnitude cue
//! carries no signal.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use maclip::{write_embeddings, EmbeddingMatrix, PromptPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const N: usize = 200;
pub const D: usize = 1024;

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub embeddings: PathBuf,
    pub prompts: PathBuf,
    pub mos: PathBuf,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

pub fn synthetic(seed: u64) -> Fixture {
    synthetic_sized(seed, N, D)
}

pub fn synthetic_sized(seed: u64, n: usize, d: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f32> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let ids: Vec<String> = (0..n).map(|i| format!("img_{i:04}.png")).collect();
    let rows: Vec<Vec<f32>> = (0..n)
        .map(|i| {
            let g = 0.2 + 3.8 * i as f32 / (n - 1).max(1) as f32;
            u.iter()
                .map(|&uj| g * uj + rng.sample::<f32, _>(StandardNormal))
                .collect()
        })
        .collect();
    let images = EmbeddingMatrix::from_rows(ids.clone(), rows).unwrap();

    let w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let scale = (d as f64).sqrt() / w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pos: Vec<f64> = w.iter().zip(&u).map(|(x, &s)| x * scale + 0.02 * s as f64).collect();
    let neg: Vec<f64> = w.iter().zip(&u).map(|(x, &s)| x * scale - 0.02 * s as f64).collect();
    let prompts = PromptPair::new(pos, neg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let fx = Fixture {
        embeddings: dir.path().join("images.mae1"),
        prompts: dir.path().join("prompts.mae1"),
        mos: dir.path().join("mos.csv"),
        dir,
    };
    write_embeddings(&images, &fx.embeddings).unwrap();
    write_embeddings(&prompts.to_matrix().unwrap(), &fx.prompts).unwrap();
    let mut mos = String::from("image_id,mos\n");
    for (i, id) in ids.iter().enumerate() {
        mos.push_str(&format!("{id},{i}\n"));
    }
    std::fs::write(&fx.mos, mos).unwrap();
    fx
}

/// Runs the compiled binary.
pub fn maclip<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_maclip"))
        .args(args)
        .env("MACLIP_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses a numeric CSV column by header name.
pub fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

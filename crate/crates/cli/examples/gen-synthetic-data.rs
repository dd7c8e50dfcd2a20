//! Regenerates `data/synthetic-adni.csv`: a seeded synthetic three-class
//! biomarker table (222/122/539 rows, two positive-valued markers) shaped
//! like a real cognitive-status dataset. Run from the workspace root:
//!
//! ```text
//! cargo run -p ujel-cli --example gen-synthetic-data
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ujel_cli::csv_io::write_grouped_csv;
use ujel_core::{Matrix, MobveParams, MultiSampleDataset};

fn main() {
    let models = [
        MobveParams::new(2.0, 1.0, 0.0).unwrap(),
        MobveParams::new(1.0, 1.0, 0.0).unwrap(),
        MobveParams::new(0.5, 1.0, 0.0).unwrap(),
    ];
    let sizes = [222usize, 122, 539];
    let mut rng = ChaCha8Rng::seed_from_u64(883);
    let groups: Vec<Matrix> = models
        .iter()
        .zip(&sizes)
        .map(|(m, &n)| m.sample(n, &mut rng))
        .collect();
    let dataset = MultiSampleDataset::new(groups).unwrap();
    let names = ["AD".to_string(), "CN".to_string(), "LMCI".to_string()];
    let cols = ["ab".to_string(), "ptau".to_string()];

    let out = std::path::Path::new("data/synthetic-adni.csv");
    std::fs::create_dir_all(out.parent().unwrap()).unwrap();
    let file = std::fs::File::create(out).unwrap();
    write_grouped_csv(file, &dataset, &names, &cols, "group").unwrap();
    eprintln!("wrote {} ({} rows)", out.display(), dataset.n_total());
}

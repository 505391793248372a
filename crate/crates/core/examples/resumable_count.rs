//! A checkpointed census: the second run restores every shard from disk.

use std::time::Instant;

use salem_census::census::{Coordinator, RunConfig};
use salem_census::salem::height;

fn main() -> salem_census::Result<()> {
    let dir = std::env::temp_dir().join(format!("salem-census-example-{}", std::process::id()));
    let coord = Coordinator::new(RunConfig {
        shards: 8,
        ..RunConfig::default()
    })?
    .with_work_dir(Some(dir.clone()));
    for pass in 1..=2 {
        let t = Instant::now();
        let out = coord.count(2, &height(60), true)?;
        println!(
            "pass {pass}: count_all {:?}, count_sq {:?}, {:.3}s",
            out.row.count_all,
            out.row.count_sq,
            t.elapsed().as_secs_f64()
        );
    }
    println!("checkpoints in {}", dir.display());
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}

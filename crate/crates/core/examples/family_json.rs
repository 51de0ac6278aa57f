//! Writes a normalized family to JSON and reads it back; the file works with
//! `symagm verify-bounds --family`.

use symagm::linalg::substream;
use symagm::symsum::{random_normalized_family, OperatorFamily, Side};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("family.json")
            .display()
            .to_string()
    });
    let fam = random_normalized_family(4, 2, Side::Left, &mut substream(11, 0))?;
    fam.write_json(path.as_ref())?;
    let back = OperatorFamily::read_json(path.as_ref(), Side::Left)?;
    let same = fam.ops().iter().zip(back.ops()).all(|(a, b)| a == b);
    println!(
        "wrote {path}; round trip exact: {same}; normalization residual {:.1e}",
        back.normalization_residual()
    );
    Ok(())
}

//! Regenerates the shipped covering-data files in data/.
use hurwitz::halphen::{dihedral_covering, format_covering, tetrahedral_covering};
use std::fs;

fn main() -> std::io::Result<()> {
    fs::write(
        "data/tetrahedral.cov",
        format!(
            "# Tetrahedral covering data over Q(\u{221a}-3): Q^3 + P^2 = R^3, n = 12.\n{}",
            format_covering(&tetrahedral_covering())
        ),
    )?;
    fs::write(
        "data/dihedral_d5.cov",
        format!(
            "# Dihedral covering data for (2,2,5): Q^2 + P^2 = (z^2+1)^5, n = 10.\n{}",
            format_covering(&dihedral_covering(5))
        ),
    )?;
    Ok(())
}

use symagm::linalg::{
    eigvalsh, haar_unitary, min_eig_hermitian, spectral_norm, substream, Matrix, SPECTRAL_REL_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = substream(10, 0);
    let g = symagm::linalg::ginibre(6, &mut rng);
    let s = spectral_norm(&g, SPECTRAL_REL_TOL)?;
    println!("‖G‖ = {:.12}", s.value);

    let h = (&g + &g.adjoint()).scale_real(0.5);
    println!("eigenvalues of (G + G*)/2: {:.4?}", eigvalsh(&h));
    println!("λ_min = {:.12}", min_eig_hermitian(&h)?);

    let u = haar_unitary(5, &mut rng);
    let err = u.adjoint_matmul(&u).max_abs_diff(&Matrix::identity(5));
    println!("Haar U: ‖U*U − I‖_max = {err:.1e}");
    Ok(())
}

//! Writes a synthetic dataset in LIBSVM format, reads it back and fits it.

use std::io::Cursor;

use inspag::problem::{generate_synthetic, libsvm, LogRegProblem};
use inspag::reference::logistic_reference;

fn main() -> inspag::Result<()> {
    let data = generate_synthetic(9, 8, 5, 0.6)?;
    let mut buf = Vec::new();
    libsvm::write(&data, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let back = libsvm::read(Cursor::new(&buf), Some(data.dim()))?;
    assert_eq!(back.len(), data.len());
    assert_eq!(back.nnz(), data.nnz());

    let text = "+1 1:0.5 3:-1.25\n-1 2:2.0\n# comment\n+1 1:1 2:1 3:1\n";
    let small = libsvm::read(Cursor::new(text), None)?;
    println!("parsed {} rows, dim {}, {} nonzeros", small.len(), small.dim(), small.nnz());

    let fit = logistic_reference(&LogRegProblem::new(back, 1e-2, 1e-2)?)?;
    println!("F* = {:.8}, |grad| = {:.1e}, x* = {:.4?}", fit.value, fit.grad_norm, fit.point);
    Ok(())
}

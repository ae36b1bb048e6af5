//! Single-qubit operators in the basis {|0>, |1>}, with sigma_z |0> = |0>.

use num_complex::Complex64 as C64;

use super::CMatrix;

const O: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn identity() -> CMatrix {
    CMatrix::from_rows(&[&[ONE, O], &[O, ONE]]).unwrap()
}

pub fn x() -> CMatrix {
    CMatrix::from_rows(&[&[O, ONE], &[ONE, O]]).unwrap()
}

pub fn y() -> CMatrix {
    CMatrix::from_rows(&[&[O, -I], &[I, O]]).unwrap()
}

pub fn z() -> CMatrix {
    CMatrix::from_rows(&[&[ONE, O], &[O, -ONE]]).unwrap()
}

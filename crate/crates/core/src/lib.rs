pub mod algebra;
pub mod effective;
pub mod fit;
pub mod lindblad;
pub mod linalg;
pub mod oracle;

pub mod csv;
pub mod vtk;

"""k-plane transform in R^d: forward projection, filtered backprojection,
isotropy projectors and sparse ridge reconstruction."""

from ._core import (
    DomainError,
    FormatError,
    Frame,
    FrameSet,
    GridField,
    GridSpec,
    Interp,
    IoError,
    QuadSpec,
    Sinogram,
    backproject,
    bessel_j,
    c_constant,
    calibrate_gain,
    chordal_distance,
    circle_frame,
    default_t_grid,
    fbp,
    forward,
    gaussian_field,
    gaussian_kplane,
    green_rbf_value,
    haar_frame_sample,
    moment_integral,
    project_iso,
    read_kpt,
    relative_l2,
    set_thread_count,
    solve_lasso,
    sphere_area,
    stiefel_total_mass,
    thread_count,
    write_kpt,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""tmflow: robust simulation of Turing machines by analytic one-dimensional
maps, two-dimensional ODE flows and smooth vector fields on the sphere,
with every continuous run cross-checked against the exact discrete stepper.

Layout
------
numerics   extended-precision scalars/intervals, quadrature, RK5(4) solver
tm         machine model, text format, exact stepper (the oracle)
encoding   configuration codes, dovetailing pairing, encoded step psi
kernels    Ψ, σ, θ, v, r, ξ, s and the analytic gate φ (point + interval)
expr       closed-form expression trees for the analytic kernels
robustmap  Υ_k, Ω, the reference extension of ψ³, the compiled 1-D map
odesim     targeting equation, iteration ODE, 2-D simulation, Ω̃ ODEs
sphere     stereographic transport, reparametrization, τ⁻¹ reads
verify     acceptance suites (also behind `tmflow verify`)
"""

from .numerics import (
    BlowUp,
    DEFAULT_CTX,
    DEFAULT_PRECISION_BITS,
    Interval,
    IvpSpec,
    NonConvergence,
    RealContext,
    StepUnderflow,
    Trajectory,
    quad_adaptive,
    solve_ivp,
)
from .tm import (
    Configuration,
    ParseError,
    TuringMachine,
    ValidationError,
    initial_config,
    load_machine,
    parse_tm,
    run_n,
    step,
    tape_string,
)
from .encoding import (
    DecodeError,
    EncodedConfig,
    decode_config,
    encode_config,
    pair2,
    pair_k,
    psi,
    psi3,
    unpair2,
    unpair_k,
)
from .kernels import (
    KernelParams,
    gate_phi,
    kernel_params,
    psi_correct,
    r_floor,
    s_gate,
    sigma,
    sigma_iter,
    theta,
    xi,
)
from .robustmap import (
    BadDelta,
    CompiledMap,
    NoiseSpec,
    NotNearConfiguration,
    NotNearInteger,
    RobustExtension3,
    compile_map,
    f_ref,
    iterate_noisy,
    omega_exact,
    upsilon_k,
)
from .odesim import (
    SimulationParams,
    TargetingSpec,
    halting_persistence,
    iterate_ode,
    omega_tilde,
    omega_tilde_read,
    omega_tilde_trajectory,
    simulate_2d,
    simulation_rhs,
    target_perturbed,
    target_solve,
    verify_windows,
)
from .sphere import (
    NorthPoleError,
    SphereField,
    SphereTrajectory,
    integrate_sphere,
    k_printed,
    k_vanishing,
    pushforward,
    reparam_field,
    stereo,
    stereo_inv,
    tau_inv,
)

__version__ = "0.1.0"

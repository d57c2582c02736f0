"""TSDF fusion engine and energy/latency design-space exploration."""

from ._core import (
    Algo,
    Constraints,
    DepthFrame,
    DesignConfig,
    DesignEvaluator,
    DesignPoint,
    FScoreReport,
    FusionConfig,
    FusionStats,
    GridParams,
    Intrinsics,
    PerfModel,
    Pose,
    SamplingConfig,
    SceneSpec,
    StorageMode,
    Trajectory,
    VoxelGrid,
    VoxelPruning,
    enumerate_designs,
    extract_surface,
    fscore,
    fuse_frame,
    fuse_sequence,
    generate_synthetic,
    latency_frame,
    load_sequence,
    pareto_front_indices,
    power,
    redundancy,
    sample_uniform,
    select_optimal,
    tsdf_update,
    use_case,
    write_sequence,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Filtration surfaces: classify dynamic graphs via standardized filtration curves."""

from .filtration import (
    DescriptorConfig,
    Filtration,
    FiltrationCurve,
    build_filtration,
    evaluate_curve,
    snapshot_curve,
)
from .forest import (
    CvReport,
    ForestConfig,
    ForestModel,
    cross_validate,
    load_model,
    predict,
    predict_many,
    save_model,
    train,
)
from .graphs import (
    Dataset,
    DatasetError,
    DynamicGraph,
    GraphSnapshot,
    load_dataset,
    make_dataset,
    save_dataset,
    snapshot,
)
from .surface import (
    FeatureMatrix,
    FiltrationSurface,
    SharedWeightIndex,
    append_timestep,
    assemble_surface,
    assemble_surface_from_curves,
    build_feature_matrix,
    build_shared_index,
    standardize,
    vectorize,
)
from .synth import (
    SiConfig,
    SynthConfig,
    bfs_subgraphs,
    build_task,
    generate_synthetic,
    simulate_si,
)
from .weights import (
    DiscreteMeasure,
    SpectralDecomposition,
    WeightFunctionConfig,
    hks,
    ricci_curvature,
    spectral_decomposition,
    wasserstein,
    weigh_edges,
)

__version__ = "0.1.0"

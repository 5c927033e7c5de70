"""slicescout: slice-window selection and committee evaluation for brain MRI.

The pipeline segments each slice with Otsu's threshold, bounds the patient
region, scores every slice by its Canny edge density inside that region, and
keeps the contiguous window of slices with the highest total score.  A
separate committee module arbitrates between per-model classifier outputs by
maximum softmax confidence and reports standard diagnostic metrics.
"""

from .errors import (CorruptFileError, FormatError, NoForegroundError,
                     SliceScoutError, UnsupportedDataError)
from .volume import (PhantomSpec, Slice2D, Volume3D, extract_slices,
                     make_phantom, read_nifti, read_raw, slice_plane, write_raw)
from .roi import (BoundingBox, Histogram256, OtsuResult, binarize, bin_indices,
                  otsu_threshold, patient_roi, segment_slice, slice_bounding_box,
                  slice_histogram)
from .edges import (CannyParams, CannyStages, GradientField, SliceProfile,
                    canny_edges, canny_stages, edge_sum_profile, entropy_profile,
                    gaussian_kernel, gaussian_smooth, read_profile_csv,
                    slice_entropy, sobel_gradients, write_profile_csv)
from .window import (ComparisonReport, DEFAULT_WINDOW, SelectedStack,
                     WindowSelection, best_window, compare_methods,
                     compute_patient_roi, select_slices, select_top_k,
                     top_k_indices, window_from_spacing, window_overlap,
                     window_sensitivity)
from .resize import ResizeSpec, downsample, downsample_plane
from .stack_io import load_manifest, load_stack, save_stack, save_top_k
from .committee import (CLASSES, POSITIVE_CLASS, AblationRow,
                        CommitteeDecision, ConfusionMatrix, MetricsReport,
                        PredictionRecord, ablation, committee_decide, confusion,
                        contribution_counts, decide_batch, default_subsets,
                        metrics, read_predictions, read_truth, softmax)
from .cohort import (CohortEntry, CohortRules, SubjectRecord, build_cohort,
                     label_from_cdr, read_metadata, stratified_split)

__version__ = "0.1.0"

__all__ = [
    "AblationRow", "BoundingBox", "CLASSES", "CannyParams", "CannyStages",
    "CohortEntry", "CohortRules",
    "CommitteeDecision", "ComparisonReport", "ConfusionMatrix",
    "CorruptFileError", "DEFAULT_WINDOW", "FormatError", "GradientField",
    "Histogram256", "MetricsReport", "NoForegroundError", "OtsuResult",
    "PhantomSpec", "PredictionRecord", "SelectedStack", "Slice2D",
    "SliceProfile", "SliceScoutError", "SubjectRecord", "UnsupportedDataError",
    "Volume3D", "WindowSelection", "ablation", "best_window", "bin_indices",
    "binarize", "build_cohort", "canny_edges", "canny_stages",
    "POSITIVE_CLASS",
    "committee_decide", "compare_methods", "compute_patient_roi", "confusion",
    "contribution_counts", "decide_batch", "default_subsets", "downsample",
    "downsample_plane",
    "edge_sum_profile", "entropy_profile", "extract_slices", "gaussian_kernel",
    "gaussian_smooth", "label_from_cdr", "load_manifest", "load_stack",
    "make_phantom", "metrics", "otsu_threshold", "patient_roi",
    "read_metadata", "read_nifti", "read_predictions", "read_profile_csv",
    "read_raw", "read_truth", "save_stack", "save_top_k", "segment_slice",
    "select_slices", "select_top_k", "slice_bounding_box", "slice_entropy",
    "slice_histogram", "slice_plane", "sobel_gradients", "softmax",
    "stratified_split", "top_k_indices", "window_from_spacing",
    "window_overlap", "window_sensitivity", "write_profile_csv", "write_raw",
]

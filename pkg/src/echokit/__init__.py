"""echokit: speckle modeling, fractional-integral denoising, GLCM texture
features, KNN pixel segmentation, MLP boundary classification, and the
image-quality metric suite, plus a pipeline CLI tying them together."""

__version__ = "0.1.0"

from .errors import (CorruptImageError, EchokitError, TrainingDivergedError,
                     UnsupportedFormatError, ValidationError)
from .imagecore import (GrayImage, LabelMask, PhantomSpec, QuantizedImage,
                        checkerboard_mask, generate_checkerboard,
                        generate_phantom, load_image, load_mask, quantize,
                        save_image, save_mask)
from .noise import SpeckleParams, apply_speckle, exp_transform, log_transform
from .fracfilter import FracParams, Mask, build_mask, denoise, gl_coefficients
from .glcm import (FEATURE_NAMES, FeatureVector, Glcm, GlcmConfig, Offset,
                   compute_glcm, feature_field, glcm_features, pixel_features)
from .knnseg import (DistanceMetric, KnnModel, TrainingSet, build_training_set,
                     distance, postprocess, predict, predict_field, segment)
from .nnclassifier import (MlpNetwork, RegressionStats, TrainConfig,
                           classify_inter_intra, forward, forward_batch,
                           gradient_check, init_network, inter_intra_labels,
                           nn_feature_stack, pixel_nn_features,
                           regression_stats, train)
from .metrics import ConfusionStats, QualityReport, confusion_stats, quality_report
from .pipeline import (PipelineConfig, RunReport, config_from_dict,
                       config_to_dict, load_config, report_dict, report_json,
                       run_pipeline, write_outputs)

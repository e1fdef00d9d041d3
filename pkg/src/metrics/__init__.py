from .detection import ConfusionMatrix, accuracy, confusion, far_mdr, fscore
from .quality import QualityReport, class_means, quality

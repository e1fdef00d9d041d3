from .forest import RandomForest, predict, rf_fit
from .grid_search import GridSearchSpec, grid_search
from .tree import DecisionTree, dt_fit

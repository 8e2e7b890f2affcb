from .service import main, build_parser, build_statistic, family_bounds

from .constants import Stage
from .stages import stage_classify, stage_stenosis, stage_pcat, stage_features, stage_metrics

STAGE_MAP = {
    Stage.CLASSIFY: stage_classify,
    Stage.STENOSIS: stage_stenosis,
    Stage.PCAT: stage_pcat,
    Stage.FEATURES: stage_features,
    Stage.METRICS: stage_metrics,
}


class Factory():
    @staticmethod
    def factory_by_stage(stage, args=(), kwargs={}):

        """from a stage (e.g., Stage.PCAT or 'pcat'), run the proper stage
        function.

        When invoking function, user must specify args and kwargs to avoid
        confusion.

        :param stage: Stage or its value
        :return: StageResult

        """

        return STAGE_MAP[Stage(stage)](*args, **kwargs)

    @staticmethod
    def stage_names():
        """names of all stages, in run order

        :return: list of string

        """

        return [stage.value for stage in STAGE_MAP]

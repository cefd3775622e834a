from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator


class PlayerSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    id: int = Field(ge=1)
    position: tuple[FiniteFloat, FiniteFloat, FiniteFloat]
    speed: FiniteFloat


class TolerancesSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    capture_radius: FiniteFloat | None = Field(None, ge=0)
    target_radius: FiniteFloat | None = Field(None, ge=0)
    tie_tolerance: FiniteFloat | None = Field(None, gt=0)


class ScenarioFileSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    pursuers: list[PlayerSchema] = Field(..., min_length=1)
    evaders: list[PlayerSchema] = Field(..., min_length=1)
    penalty_L: FiniteFloat | None = Field(None, gt=0)
    tolerances: TolerancesSchema | None = None
    seed: int | None = None

    @model_validator(mode='after')
    def check_unique_ids(self):
        for team in ('pursuers', 'evaders'):
            ids = [p.id for p in getattr(self, team)]
            if len(ids) != len(set(ids)):
                raise ValueError(f'{team} ids must be unique')
        return self

import cvqdyn.exceptions as exceptions
import cvqdyn.logic.action.get
import cvqdyn.logic.action.run


def get_actions():
    return {
        'scenario_list': cvqdyn.logic.action.get.scenario_list,
        'scenario_describe': cvqdyn.logic.action.get.scenario_describe,
        'scenario_validate': cvqdyn.logic.action.get.scenario_validate,
        'scenario_run': cvqdyn.logic.action.run.scenario_run,
    }


def get_action(name):
    try:
        return get_actions()[name]
    except KeyError:
        raise exceptions.ValidationError(
            {'action': 'unknown action {0!r}'.format(name)})

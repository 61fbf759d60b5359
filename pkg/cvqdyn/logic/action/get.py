import cvqdyn.exceptions as exceptions
import cvqdyn.logic.schema as schema


def scenario_list(context, data_dict):
    '''Return the scenario kinds with a one-line description each.

    :rtype: list of dicts

    '''
    return [{'name': s.name, 'description': s.description, 'units': s.units}
            for _, s in sorted(schema.SCENARIOS.items())]


def scenario_describe(context, data_dict):
    '''Return the parameters of a scenario kind with units and defaults.

    :param name: the scenario kind
    :type name: string
    :param units: the unit system to label parameters in (optional)
    :type units: string

    :rtype: dict

    '''
    try:
        name = data_dict['name']
    except KeyError:
        raise exceptions.ValidationError({'name': 'missing name'})
    return schema.describe(name, data_dict.get('units'))


def scenario_validate(context, data_dict):
    '''Validate a scenario config without running it.

    :returns: the normalized config, every default filled in
    :rtype: dict

    :raises cvqdyn.exceptions.ValidationError: naming every offending field

    '''
    return schema.validate(data_dict, context.get('tier', schema.FAST))
